#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "absaug/corpus.hpp"

namespace absaug {

enum class Setting : std::uint8_t { standard, balanced };

std::string_view to_string(Setting s) noexcept;
std::optional<Setting> parse_setting(std::string_view s) noexcept;

/// Oversampling plan: every label is topped up to the largest class size.
struct BalancePlan {
  std::size_t target_per_label = 0;
  /// (index into the source dataset, number of copies), grouped by label in
  /// canonical order and ascending by index within a label.
  std::vector<std::pair<std::size_t, std::size_t>> duplications;

  std::size_t total_copies() const noexcept;
};

/// Draws duplicates uniformly with replacement from each deficient class.
/// Throws DataError if the dataset is empty or any label has no instances.
BalancePlan plan_balance(const Dataset& d, std::uint64_t seed);

/// Originals in their original order, then the planned duplicates
/// (origin = duplicate, source_id kept).
Dataset apply_balance(const Dataset& d, const BalancePlan& plan);

Dataset balance(const Dataset& d, std::uint64_t seed);

/// Appends one augmented instance per base instance, reordered to follow base order.
/// Throws DataError listing missing/extra source ids when the two sides do not pair up.
Dataset merge_augmented(const Dataset& base, const Dataset& augmented, Setting setting);

}  // namespace absaug
