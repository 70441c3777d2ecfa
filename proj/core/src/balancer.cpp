#include "absaug/balancer.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "absaug/errors.hpp"
#include "absaug/rng.hpp"

namespace absaug {

std::string_view to_string(Setting s) noexcept {
  return s == Setting::standard ? "standard" : "balanced";
}

std::optional<Setting> parse_setting(std::string_view s) noexcept {
  if (s == "standard") return Setting::standard;
  if (s == "balanced") return Setting::balanced;
  return std::nullopt;
}

std::size_t BalancePlan::total_copies() const noexcept {
  std::size_t n = 0;
  for (const auto& [idx, copies] : duplications) n += copies;
  return n;
}

BalancePlan plan_balance(const Dataset& d, std::uint64_t seed) {
  if (d.empty()) throw DataError("cannot balance: dataset is empty");

  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < d.size(); ++i) members[index_of(d.instances[i].label)].push_back(i);
  for (Polarity p : kPolarities) {
    if (members[index_of(p)].empty()) {
      throw DataError("cannot balance: label " + std::string(to_string(p)) + " has no instances");
    }
  }

  BalancePlan plan;
  plan.target_per_label = label_counts(d).max();

  Rng rng(seed);
  for (Polarity p : kPolarities) {
    const auto& pool = members[index_of(p)];
    std::map<std::size_t, std::size_t> copies;
    for (std::size_t k = pool.size(); k < plan.target_per_label; ++k) {
      ++copies[pool[rng.uniform_index(pool.size())]];
    }
    for (const auto& entry : copies) plan.duplications.push_back(entry);
  }
  return plan;
}

Dataset apply_balance(const Dataset& d, const BalancePlan& plan) {
  Dataset out{d.split, d.name, d.instances};
  out.instances.reserve(d.size() + plan.total_copies());
  for (const auto& [idx, copies] : plan.duplications) {
    if (idx >= d.size()) throw DataError("balance plan index out of range");
    for (std::size_t c = 0; c < copies; ++c) {
      Instance dup = d.instances[idx];
      dup.origin = Origin::duplicate;
      out.instances.push_back(std::move(dup));
    }
  }
  return out;
}

Dataset balance(const Dataset& d, std::uint64_t seed) {
  return apply_balance(d, plan_balance(d, seed));
}

Dataset merge_augmented(const Dataset& base, const Dataset& augmented, Setting setting) {
  if (setting == Setting::standard) {
    for (const auto& inst : base.instances) {
      if (inst.origin != Origin::original) {
        throw DataError("standard setting expects only original base instances");
      }
    }
  } else if (!base.empty()) {
    const auto counts = label_counts(base);
    if (counts[Polarity::positive] != counts[Polarity::neutral] ||
        counts[Polarity::neutral] != counts[Polarity::negative]) {
      throw DataError("balanced setting expects a label-balanced base");
    }
  }
  for (const auto& inst : augmented.instances) {
    if (inst.origin != Origin::augmented) {
      throw DataError("augmented set contains a non-augmented instance '" + inst.source_id + "'");
    }
  }

  // Queue augmented indices per id, then pull them in base order.
  std::map<std::string, std::vector<std::size_t>> by_id;
  for (std::size_t i = augmented.size(); i-- > 0;) {
    by_id[augmented.instances[i].source_id].push_back(i);
  }
  std::vector<std::size_t> order;
  order.reserve(base.size());
  std::vector<std::string> missing;
  for (const auto& inst : base.instances) {
    auto it = by_id.find(inst.source_id);
    if (it == by_id.end() || it->second.empty()) {
      missing.push_back(inst.source_id);
      continue;
    }
    order.push_back(it->second.back());
    it->second.pop_back();
  }
  std::vector<std::string> extra;
  for (const auto& [id, rest] : by_id) extra.insert(extra.end(), rest.size(), id);

  if (!missing.empty() || !extra.empty()) {
    const auto join = [](const std::vector<std::string>& ids) {
      std::string s;
      for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
      return s.empty() ? std::string("none") : s;
    };
    throw DataError("source_id mismatch between base and augmented sets; missing: " +
                    join(missing) + "; extra: " + join(extra));
  }

  Dataset out{base.split, base.name, base.instances};
  out.instances.reserve(base.size() * 2);
  for (std::size_t idx : order) out.instances.push_back(augmented.instances[idx]);
  return out;
}

}  // namespace absaug
