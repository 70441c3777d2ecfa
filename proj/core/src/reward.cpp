#include "absaug/reward.hpp"

#include "absaug/errors.hpp"
#include "absaug/jsonl.hpp"

namespace absaug {
namespace {

void check_single_source(std::span<const AugmentedCandidate> pool) {
  for (const auto& c : pool) {
    if (c.source != pool.front().source) {
      throw DataError("pool mixes sources '" + pool.front().source.source_id + "' and '" +
                      c.source.source_id + "'");
    }
  }
}

ScoredPool score_with(std::span<const AugmentedCandidate> pool, const LdaModel& lda,
                      const RewardOptions& options,
                      std::span<const Outcome<Prediction>> predictions) {
  ScoredPool scored;
  if (pool.empty()) return scored;
  const Instance& source = pool.front().source;
  const TopicVector source_topics = infer(lda, source.sentence, options.fold_in_iterations);

  std::size_t next_prediction = 0;
  scored.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& c = pool[i];
    ScoredCandidate s;
    s.source_id = source.source_id;
    s.pool_index = i;
    s.text = c.text;
    if (c.valid) {
      const auto& outcome = predictions[next_prediction++];
      try {
        s.predicted = outcome.get();
      } catch (const GatewayError& e) {
        throw GatewayError("pool_index " + std::to_string(i) + " of '" + source.source_id +
                               "': " + e.what(),
                           e.backend_id(), e.status(), e.retryable());
      }
    }
    s.consistent = s.predicted == to_prediction(source.label);
    s.relevance = relevance(infer(lda, c.text, options.fold_in_iterations), source_topics);
    scored.push_back(std::move(s));
  }
  return scored;
}

std::vector<PredictRequest> prediction_requests(std::span<const AugmentedCandidate> pool) {
  std::vector<PredictRequest> out;
  for (const auto& c : pool) {
    if (c.valid) out.push_back({c.text, c.source.aspect});
  }
  return out;
}

}  // namespace

ScoredPool score_pool(std::span<const AugmentedCandidate> pool, const LdaModel& lda,
                      const Gateway& gateway, const RewardOptions& options) {
  check_single_source(pool);
  const auto requests = prediction_requests(pool);
  std::vector<Outcome<Prediction>> predictions;
  predictions.reserve(requests.size());
  for (const auto& r : requests) {
    Outcome<Prediction> o;
    try {
      o.value = gateway.predict_sentiment(r.sentence, r.aspect);
    } catch (...) {
      o.error = std::current_exception();
    }
    predictions.push_back(std::move(o));
  }
  return score_with(pool, lda, options, predictions);
}

std::vector<ScoredPool> score_all(std::span<const CandidatePool> pools, const LdaModel& lda,
                                  const Gateway& gateway, const RewardOptions& options) {
  std::vector<PredictRequest> requests;
  std::vector<std::size_t> offsets;
  offsets.reserve(pools.size() + 1);
  for (const auto& pool : pools) {
    check_single_source(pool);
    offsets.push_back(requests.size());
    auto r = prediction_requests(pool);
    requests.insert(requests.end(), std::make_move_iterator(r.begin()),
                    std::make_move_iterator(r.end()));
  }
  offsets.push_back(requests.size());

  const auto predictions = gateway.predict_all(requests);
  const std::span<const Outcome<Prediction>> all(predictions);

  std::vector<ScoredPool> scored(pools.size());
  for (std::size_t p = 0; p < pools.size(); ++p) {
    scored[p] = score_with(pools[p], lda, options,
                           all.subspan(offsets[p], offsets[p + 1] - offsets[p]));
  }
  return scored;
}

std::string write_scored_jsonl(std::span<const ScoredPool> pools) {
  std::string out;
  for (const auto& pool : pools) {
    for (const auto& s : pool) {
      nlohmann::ordered_json j;
      j["source_id"] = s.source_id;
      j["pool_index"] = s.pool_index;
      j["text"] = s.text;
      j["predicted"] = to_string(s.predicted);
      j["consistent"] = s.consistent;
      j["relevance"] = s.relevance;
      append_jsonl(out, j);
    }
  }
  return out;
}

std::vector<ScoredPool> read_scored_jsonl(std::string_view bytes) {
  std::vector<ScoredPool> pools;
  for_each_jsonl(bytes, [&](const nlohmann::json& obj, std::size_t line) {
    const auto where = " at line " + std::to_string(line);
    for (const char* key : {"source_id", "pool_index", "text", "predicted", "consistent", "relevance"}) {
      if (!obj.contains(key)) throw DataError(std::string("missing key '") + key + "'" + where);
    }
    ScoredCandidate s;
    try {
      s.source_id = obj["source_id"].get<std::string>();
      s.pool_index = obj["pool_index"].get<std::size_t>();
      s.text = obj["text"].get<std::string>();
      const auto predicted = obj["predicted"].get<std::string>();
      auto p = parse_prediction_label(predicted);
      if (!p) throw DataError("invalid predicted label '" + predicted + "'" + where);
      s.predicted = *p;
      s.consistent = obj["consistent"].get<bool>();
      s.relevance = obj["relevance"].get<double>();
    } catch (const nlohmann::json::type_error& e) {
      throw DataError(std::string("wrong value type") + where + ": " + e.what());
    }
    if (s.pool_index == 0) {
      pools.emplace_back();
    } else if (pools.empty() || pools.back().size() != s.pool_index) {
      throw DataError("pool_index " + std::to_string(s.pool_index) + " out of sequence" + where);
    } else if (pools.back().front().source_id != s.source_id) {
      throw DataError("pool mixes source_ids '" + pools.back().front().source_id + "' and '" +
                      s.source_id + "'" + where);
    }
    pools.back().push_back(std::move(s));
  });
  return pools;
}

}  // namespace absaug
