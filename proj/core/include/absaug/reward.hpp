#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/augmenter.hpp"
#include "absaug/corpus.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/polarity.hpp"
#include "absaug/topic_model.hpp"

namespace absaug {

/// A candidate with both rewards attached. The source instance is referenced by id.
struct ScoredCandidate {
  std::string source_id;
  std::size_t pool_index = 0;
  std::string text;
  Prediction predicted = Prediction::unparseable;
  /// Reward 1: predicted == gold label.
  bool consistent = false;
  /// Reward 2: cosine of the candidate's and the source's topic vectors.
  double relevance = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

using ScoredPool = std::vector<ScoredCandidate>;

struct RewardOptions {
  std::size_t fold_in_iterations = kDefaultFoldInIterations;
};

/// Scores one pool. Invalid candidates are unparseable without a gateway call.
/// Throws DataError if candidates come from different sources; gateway failures
/// are rethrown as GatewayError naming the pool_index.
ScoredPool score_pool(std::span<const AugmentedCandidate> pool, const LdaModel& lda,
                      const Gateway& gateway, const RewardOptions& options = {});

/// Scores every pool, batching prediction calls through the gateway.
std::vector<ScoredPool> score_all(std::span<const CandidatePool> pools, const LdaModel& lda,
                                  const Gateway& gateway, const RewardOptions& options = {});

/// {"source_id","pool_index","text","predicted","consistent","relevance"} per line.
std::string write_scored_jsonl(std::span<const ScoredPool> pools);

/// A new pool starts whenever pool_index is 0. Throws DataError on a pool whose
/// source_id changes midway or whose indices are not 0, 1, 2, ...
std::vector<ScoredPool> read_scored_jsonl(std::string_view bytes);

}  // namespace absaug
