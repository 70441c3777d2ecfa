#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/corpus.hpp"
#include "absaug/llm_gateway.hpp"

namespace absaug {

enum class RejectionReason : std::uint8_t { missing_aspect, empty, boilerplate };

std::string_view to_string(RejectionReason r) noexcept;
std::optional<RejectionReason> parse_rejection_reason(std::string_view s) noexcept;

struct AugmentedCandidate {
  Instance source;
  std::string text;
  bool valid = false;
  std::optional<RejectionReason> rejection_reason;

  bool operator==(const AugmentedCandidate&) const = default;
};

/// One instance's candidates, in sample order.
using CandidatePool = std::vector<AugmentedCandidate>;

/// Prefixes a model sometimes puts in front of the enhanced text; matched ignoring case.
inline constexpr std::array<std::string_view, 3> kBoilerplatePrefixes{
    "here is the enhanced sentence:", "enhanced sentence:", "enhanced text:"};

/// The augmentation prompt with sentence, aspect and capitalized sentiment filled in.
std::string build_prompt(const Instance& instance);

/// Removes at most one boilerplate prefix plus the whitespace after it.
std::string_view strip_boilerplate(std::string_view text) noexcept;

AugmentedCandidate validate_candidate(const Instance& source, std::string_view raw);

struct SamplingConfig {
  double temperature = 1.0;
  std::size_t top_k = 50;
  std::size_t max_tokens = 256;
  /// When set, request i carries seed + i.
  std::optional<std::int64_t> seed;
};

/// n validated candidates for one instance; invalid ones stay in the pool, flagged.
CandidatePool augment(const Instance& instance, std::size_t n, const Gateway& gateway,
                      const SamplingConfig& sampling = {});

/// One pool per dataset instance, in dataset order. Requests go through the
/// gateway's bounded pool; the first failure (by instance order) is rethrown.
std::vector<CandidatePool> augment_all(const Dataset& d, std::size_t n, const Gateway& gateway,
                                       const SamplingConfig& sampling = {});

/// {"source_id","text","valid","rejection_reason"} per candidate, pools back to back.
std::string write_candidates_jsonl(std::span<const CandidatePool> pools);

/// Splits a candidates file into |d| equal pools aligned with d's instances.
std::vector<CandidatePool> read_candidates_jsonl(std::string_view bytes, const Dataset& d);

}  // namespace absaug
