#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "absaug/rng.hpp"
#include "absaug/tokenizer.hpp"

namespace absaug {

struct LdaParams {
  std::size_t topics = 10;
  double alpha = 0.1;
  double beta = 0.01;
  std::size_t iterations = 200;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Normalized document-topic distribution. Components are strictly positive.
struct TopicVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const TopicVector&) const = default;
};

/// Frozen topic-word statistics from a collapsed Gibbs run.
class LdaModel {
 public:
  LdaModel() = default;
  LdaModel(LdaParams params, Tokenizer tokenizer, std::vector<std::string> vocab,
           std::vector<std::uint32_t> topic_word_counts);

  std::size_t topics() const noexcept { return params_.topics; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  const LdaParams& params() const noexcept { return params_; }
  const Tokenizer& tokenizer() const noexcept { return tokenizer_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }

  std::optional<std::size_t> word_index(std::string_view word) const;

  /// Row-major K x V.
  const std::vector<std::uint32_t>& topic_word_counts() const noexcept { return topic_word_; }
  std::uint32_t count(std::size_t topic, std::size_t word) const noexcept {
    return topic_word_[topic * vocab_.size() + word];
  }
  const std::vector<std::uint64_t>& topic_totals() const noexcept { return topic_totals_; }

  /// topic_totals[k] == sum_v topic_word_counts[k][v] and the shapes agree.
  bool consistent() const noexcept;

  nlohmann::json to_json() const;
  static LdaModel from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

  bool operator==(const LdaModel& other) const;

 private:
  LdaParams params_;
  Tokenizer tokenizer_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::uint32_t> topic_word_;
  std::vector<std::uint64_t> topic_totals_;
};

/// Collapsed Gibbs sampler over a tokenized corpus. fit_lda drives it; exposed so
/// callers can observe counts between sweeps.
class LdaSampler {
 public:
  /// Builds the vocabulary in first-occurrence order and draws initial topics.
  /// Throws DataError when no in-vocabulary tokens remain after tokenization.
  LdaSampler(std::span<const std::string> corpus, const LdaParams& params, Tokenizer tokenizer);

  /// One full pass resampling every token's topic.
  void sweep();

  std::size_t sweeps_done() const noexcept { return sweeps_; }
  std::size_t token_count() const noexcept { return words_.size(); }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }

  const std::vector<std::uint32_t>& topic_word_counts() const noexcept { return topic_word_; }
  const std::vector<std::uint64_t>& topic_totals() const noexcept { return topic_totals_; }
  const std::vector<std::uint32_t>& doc_topic_counts() const noexcept { return doc_topic_; }

  /// Recounts from the assignments and compares with the running tallies.
  bool counts_consistent() const;

  LdaModel freeze() const;

 private:
  LdaParams params_;
  Tokenizer tokenizer_;
  std::vector<std::string> vocab_;
  std::vector<std::uint32_t> words_;       // token -> word id
  std::vector<std::uint32_t> docs_;        // token -> doc id
  std::vector<std::uint32_t> topics_;      // token -> topic
  std::vector<std::uint32_t> topic_word_;  // K x V
  std::vector<std::uint64_t> topic_totals_;
  std::vector<std::uint32_t> doc_topic_;   // D x K
  std::vector<double> weights_;
  std::size_t num_docs_ = 0;
  std::size_t sweeps_ = 0;
  Rng rng_;
};

LdaModel fit_lda(std::span<const std::string> corpus, const LdaParams& params,
                 Tokenizer tokenizer = {});

inline constexpr std::size_t kDefaultFoldInIterations = 50;

/// Fold-in Gibbs with the model's topic-word counts held fixed, then
/// z_k = (n_k + alpha) / (N + K alpha). Documents without in-vocabulary tokens map
/// to the uniform vector. Deterministic: the chain is seeded from the model seed
/// and the document's tokens.
TopicVector infer(const LdaModel& model, std::string_view doc,
                  std::size_t fold_in_iterations = kDefaultFoldInIterations);

/// Cosine similarity of two topic vectors, in (0, 1] for smoothed vectors.
double relevance(const TopicVector& a, const TopicVector& b);

}  // namespace absaug
