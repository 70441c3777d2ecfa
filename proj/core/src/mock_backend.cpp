#include "absaug/mock_backend.hpp"

#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"
#include "absaug/hashing.hpp"
#include "absaug/jsonl.hpp"

namespace absaug {
namespace {

std::vector<std::string> string_list(const nlohmann::json& j, std::size_t line) {
  if (!j.is_array() || j.empty()) {
    throw DataError("mock script line " + std::to_string(line) +
                    ": completions must be a non-empty array of strings");
  }
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw DataError("mock script line " + std::to_string(line) + ": completion is not a string");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string prompt_hash(std::string_view prompt) { return sha256_hex(prompt); }

MockBackend MockBackend::from_jsonl(std::string_view script) {
  MockBackend mock;
  for_each_jsonl(script, [&](const nlohmann::json& obj, std::size_t line) {
    if (obj.contains("default")) {
      mock.set_default(string_list(obj["default"], line));
      return;
    }
    Entry entry;
    if (obj.contains("error")) {
      entry.error = obj["error"].get<std::string>();
    } else if (obj.contains("completions")) {
      entry.completions = string_list(obj["completions"], line);
    } else {
      throw DataError("mock script line " + std::to_string(line) +
                      ": expected \"completions\", \"error\" or \"default\"");
    }
    if (obj.contains("prompt_hash")) {
      mock.by_hash_[obj["prompt_hash"].get<std::string>()] = std::move(entry);
    } else if (obj.contains("index")) {
      mock.by_index_[obj["index"].get<std::size_t>()] = std::move(entry);
    } else {
      throw DataError("mock script line " + std::to_string(line) +
                      ": expected \"prompt_hash\" or \"index\"");
    }
  });
  return mock;
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
  return from_jsonl(read_file(path));
}

void MockBackend::add_for_prompt(std::string_view prompt, std::vector<std::string> completions) {
  add_by_hash(prompt_hash(prompt), std::move(completions));
}

void MockBackend::add_by_hash(std::string hash, std::vector<std::string> completions) {
  by_hash_[std::move(hash)] = Entry{std::move(completions), std::nullopt};
}

void MockBackend::add_error_for_prompt(std::string_view prompt, std::string message) {
  by_hash_[prompt_hash(prompt)] = Entry{{}, std::move(message)};
}

void MockBackend::add_by_index(std::size_t index, std::vector<std::string> completions) {
  by_index_[index] = Entry{std::move(completions), std::nullopt};
}

void MockBackend::set_default(std::vector<std::string> completions) {
  default_ = std::move(completions);
}

std::vector<std::string> MockBackend::complete(const GenRequest& request) {
  const std::size_t call = calls_++;

  const Entry* entry = nullptr;
  if (auto it = by_hash_.find(prompt_hash(request.prompt)); it != by_hash_.end()) {
    entry = &it->second;
  } else if (auto jt = by_index_.find(call); jt != by_index_.end()) {
    entry = &jt->second;
  }

  const std::vector<std::string>* script = nullptr;
  if (entry) {
    if (entry->error) throw GatewayError("mock: " + *entry->error, id());
    script = &entry->completions;
  } else if (default_) {
    script = &*default_;
  } else {
    throw GatewayError("mock: no script entry for prompt " + prompt_hash(request.prompt) +
                           " (call " + std::to_string(call) + ")",
                       id());
  }

  std::vector<std::string> out;
  out.reserve(request.n_samples);
  for (std::size_t i = 0; i < request.n_samples; ++i) out.push_back((*script)[i % script->size()]);
  return out;
}

}  // namespace absaug
