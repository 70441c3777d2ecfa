#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absaug/reward.hpp"

namespace absaug {

enum class Branch : std::uint8_t { normal, chosen_empty, rejected_empty };

std::string_view to_string(Branch b) noexcept;
std::optional<Branch> parse_branch(std::string_view s) noexcept;

/// Which rewards drive selection.
///  both:           partition by consistency, rank by relevance.
///  sentiment_only: partition by consistency, rank by pool_index.
///  topic_only:     every candidate counts as consistent, rank by relevance.
enum class SelectionMode : std::uint8_t { both, sentiment_only, topic_only };

std::string_view to_string(SelectionMode m) noexcept;

struct PreferencePair {
  std::string source_id;
  std::string prompt;
  std::string chosen;
  std::string rejected;
  Branch branch = Branch::normal;
  std::size_t chosen_index = 0;
  std::size_t rejected_index = 0;

  bool operator==(const PreferencePair&) const = default;
};

struct Skip {
  std::string source_id;
  std::string reason;

  bool operator==(const Skip&) const = default;
};

using PairOutcome = std::variant<PreferencePair, Skip>;

/// Selects (chosen, rejected) from one pool.
///  - both partitions non-empty: chosen = lowest relevance among consistent,
///    rejected = highest relevance among inconsistent;
///  - no consistent member: chosen = lowest, rejected = highest over the pool;
///  - no inconsistent member: chosen = highest, rejected = lowest over the pool.
/// Ties go to the lowest pool_index. If both picks land on one member, rejected
/// moves to the next pool_index. Pools with fewer than two members, and picks
/// whose texts are identical, are skipped.
PairOutcome build_pair(std::span<const ScoredCandidate> pool, std::string prompt,
                       SelectionMode mode = SelectionMode::both);

struct PreferenceBuild {
  std::vector<PreferencePair> pairs;
  std::vector<Skip> skipped;
};

/// One pair per non-skipped pool, in input order. prompts[i] belongs to pools[i].
PreferenceBuild build_preference_dataset(std::span<const ScoredPool> pools,
                                         std::span<const std::string> prompts,
                                         SelectionMode mode = SelectionMode::both);

}  // namespace absaug
