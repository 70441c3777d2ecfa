#include "absaug/preference.hpp"

#include "absaug/errors.hpp"

namespace absaug {
namespace {

struct Ranker {
  std::span<const ScoredCandidate> pool;
  SelectionMode mode;

  double score(std::size_t i) const {
    return mode == SelectionMode::sentiment_only ? static_cast<double>(pool[i].pool_index)
                                                 : pool[i].relevance;
  }
  bool consistent(std::size_t i) const {
    return mode == SelectionMode::topic_only || pool[i].consistent;
  }

  // Lowest pool_index wins ties in both directions.
  std::size_t argmin(std::span<const std::size_t> members) const {
    std::size_t best = members.front();
    for (std::size_t i : members.subspan(1)) {
      if (score(i) < score(best) ||
          (score(i) == score(best) && pool[i].pool_index < pool[best].pool_index)) {
        best = i;
      }
    }
    return best;
  }
  std::size_t argmax(std::span<const std::size_t> members) const {
    std::size_t best = members.front();
    for (std::size_t i : members.subspan(1)) {
      if (score(i) > score(best) ||
          (score(i) == score(best) && pool[i].pool_index < pool[best].pool_index)) {
        best = i;
      }
    }
    return best;
  }

  /// The member with the next pool_index after `taken`, wrapping to the lowest one.
  std::optional<std::size_t> next_after(std::size_t taken) const {
    std::optional<std::size_t> after;
    std::optional<std::size_t> lowest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i == taken) continue;
      if (pool[i].pool_index > pool[taken].pool_index &&
          (!after || pool[i].pool_index < pool[*after].pool_index)) {
        after = i;
      }
      if (!lowest || pool[i].pool_index < pool[*lowest].pool_index) lowest = i;
    }
    return after ? after : lowest;
  }
};

}  // namespace

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::normal: return "normal";
    case Branch::chosen_empty: return "chosen_empty";
    case Branch::rejected_empty: return "rejected_empty";
  }
  return "normal";
}

std::optional<Branch> parse_branch(std::string_view s) noexcept {
  for (Branch b : {Branch::normal, Branch::chosen_empty, Branch::rejected_empty}) {
    if (to_string(b) == s) return b;
  }
  return std::nullopt;
}

std::string_view to_string(SelectionMode m) noexcept {
  switch (m) {
    case SelectionMode::both: return "both";
    case SelectionMode::sentiment_only: return "sentiment_only";
    case SelectionMode::topic_only: return "topic_only";
  }
  return "both";
}

PairOutcome build_pair(std::span<const ScoredCandidate> pool, std::string prompt,
                       SelectionMode mode) {
  if (pool.empty()) return Skip{"", "empty pool"};
  const std::string& source_id = pool.front().source_id;
  for (const auto& c : pool) {
    if (c.source_id != source_id) {
      throw DataError("pool mixes source_ids '" + source_id + "' and '" + c.source_id + "'");
    }
  }
  if (pool.size() < 2) {
    return Skip{source_id, "pool has " + std::to_string(pool.size()) + " candidate(s), need 2"};
  }

  const Ranker rank{pool, mode};
  std::vector<std::size_t> chosen_set;
  std::vector<std::size_t> rejected_set;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (rank.consistent(i) ? chosen_set : rejected_set).push_back(i);
    all.push_back(i);
  }

  Branch branch;
  std::size_t chosen;
  std::size_t rejected;
  if (chosen_set.empty()) {
    branch = Branch::chosen_empty;
    chosen = rank.argmin(all);
    rejected = rank.argmax(all);
  } else if (rejected_set.empty()) {
    branch = Branch::rejected_empty;
    chosen = rank.argmax(all);
    rejected = rank.argmin(all);
  } else {
    branch = Branch::normal;
    chosen = rank.argmin(chosen_set);
    rejected = rank.argmax(rejected_set);
  }

  if (chosen == rejected) {
    auto next = rank.next_after(chosen);
    if (!next) return Skip{source_id, "fewer than 2 distinct candidates"};
    rejected = *next;
  }
  if (pool[chosen].text == pool[rejected].text) {
    return Skip{source_id, "chosen and rejected texts are identical"};
  }

  return PreferencePair{source_id,           std::move(prompt),          pool[chosen].text,
                        pool[rejected].text, branch,                     pool[chosen].pool_index,
                        pool[rejected].pool_index};
}

PreferenceBuild build_preference_dataset(std::span<const ScoredPool> pools,
                                         std::span<const std::string> prompts,
                                         SelectionMode mode) {
  if (pools.size() != prompts.size()) {
    throw DataError("got " + std::to_string(pools.size()) + " pools but " +
                    std::to_string(prompts.size()) + " prompts");
  }
  PreferenceBuild out;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    auto result = build_pair(pools[i], prompts[i], mode);
    if (auto* pair = std::get_if<PreferencePair>(&result)) {
      out.pairs.push_back(std::move(*pair));
    } else {
      out.skipped.push_back(std::get<Skip>(std::move(result)));
    }
  }
  return out;
}

}  // namespace absaug
