#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/llm_gateway.hpp"

namespace absaug {

/// Key used by mock scripts: SHA-256 hex of the exact prompt text.
std::string prompt_hash(std::string_view prompt);

/// Scripted backend for tests and offline runs. Single-threaded.
///
/// Script lines (JSONL), checked in this order for each call:
///   {"prompt_hash": "<sha256>", "completions": ["...", ...]}
///   {"prompt_hash": "<sha256>", "error": "message"}        (non-retryable failure)
///   {"index": 3, "completions": [...]}                      (the 4th call to this backend)
///   {"default": ["...", ...]}
/// A request for n samples returns completions[i % size] for i in [0, n).
class MockBackend : public Backend {
 public:
  MockBackend() = default;

  static MockBackend from_jsonl(std::string_view script);
  static MockBackend load(const std::filesystem::path& path);

  void add_for_prompt(std::string_view prompt, std::vector<std::string> completions);
  void add_by_hash(std::string hash, std::vector<std::string> completions);
  void add_error_for_prompt(std::string_view prompt, std::string message);
  void add_by_index(std::size_t index, std::vector<std::string> completions);
  void set_default(std::vector<std::string> completions);

  std::string id() const override { return "mock"; }
  std::vector<std::string> complete(const GenRequest& request) override;

  std::size_t calls() const noexcept { return calls_; }

 private:
  struct Entry {
    std::vector<std::string> completions;
    std::optional<std::string> error;
  };

  std::map<std::string, Entry> by_hash_;
  std::map<std::size_t, Entry> by_index_;
  std::optional<std::vector<std::string>> default_;
  std::size_t calls_ = 0;
};

}  // namespace absaug
