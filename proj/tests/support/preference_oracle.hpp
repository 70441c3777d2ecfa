#pragma once

// Brute-force reference for preference selection, written from the selection rules
// without sharing code with the builder: every candidate is tested against every
// other one for the extremum property.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absaug/preference.hpp"

namespace absaug::testing {

struct OracleChoice {
  Branch branch = Branch::normal;
  std::size_t chosen = 0;
  std::size_t rejected = 0;
};

inline std::optional<OracleChoice> oracle_pair(const ScoredPool& pool, SelectionMode mode) {
  const std::size_t n = pool.size();
  if (n < 2) return std::nullopt;

  auto flag = [&](std::size_t i) { return mode == SelectionMode::topic_only || pool[i].consistent; };
  auto value = [&](std::size_t i) {
    return mode == SelectionMode::sentiment_only ? double(pool[i].pool_index) : pool[i].relevance;
  };
  // "a is at least as good a minimum as b": smaller value, or equal value and smaller index.
  auto min_before = [&](std::size_t a, std::size_t b) {
    return value(a) < value(b) || (value(a) == value(b) && pool[a].pool_index <= pool[b].pool_index);
  };
  auto max_before = [&](std::size_t a, std::size_t b) {
    return value(a) > value(b) || (value(a) == value(b) && pool[a].pool_index <= pool[b].pool_index);
  };
  auto extreme = [&](auto in_set, auto before) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_set(i)) continue;
      bool beats_all = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_set(j) && !before(i, j)) beats_all = false;
      }
      if (beats_all) return i;
    }
    return std::nullopt;
  };

  bool any_consistent = false, any_inconsistent = false;
  for (std::size_t i = 0; i < n; ++i) (flag(i) ? any_consistent : any_inconsistent) = true;

  auto everyone = [](std::size_t) { return true; };
  auto consistent_only = [&](std::size_t i) { return flag(i); };
  auto inconsistent_only = [&](std::size_t i) { return !flag(i); };

  OracleChoice out;
  if (!any_consistent) {
    out.branch = Branch::chosen_empty;
    out.chosen = *extreme(everyone, min_before);
    out.rejected = *extreme(everyone, max_before);
  } else if (!any_inconsistent) {
    out.branch = Branch::rejected_empty;
    out.chosen = *extreme(everyone, max_before);
    out.rejected = *extreme(everyone, min_before);
  } else {
    out.branch = Branch::normal;
    out.chosen = *extreme(consistent_only, min_before);
    out.rejected = *extreme(inconsistent_only, max_before);
  }
  if (out.chosen == out.rejected) {
    // Smallest pool_index above the chosen one, else the smallest overall.
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == out.chosen || pool[i].pool_index <= pool[out.chosen].pool_index) continue;
      if (!next || pool[i].pool_index < pool[*next].pool_index) next = i;
    }
    if (!next) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i != out.chosen && (!next || pool[i].pool_index < pool[*next].pool_index)) next = i;
      }
    }
    out.rejected = *next;
  }
  if (pool[out.chosen].text == pool[out.rejected].text) return std::nullopt;
  return out;
}

}  // namespace absaug::testing
