#include "absaug/topic_model.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"
#include "absaug/hashing.hpp"

namespace absaug {
namespace {

constexpr int kFormatVersion = 1;

std::size_t sample_topic(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return weights.size() - 1;
}

}  // namespace

void LdaParams::validate() const {
  if (topics < 2) throw ConfigError("LDA needs at least 2 topics");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("LDA alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("LDA beta must be > 0");
  if (iterations < 1) throw ConfigError("LDA needs at least 1 iteration");
}

// ---------------------------------------------------------------------------
// LdaModel

LdaModel::LdaModel(LdaParams params, Tokenizer tokenizer, std::vector<std::string> vocab,
                   std::vector<std::uint32_t> topic_word_counts)
    : params_(params),
      tokenizer_(std::move(tokenizer)),
      vocab_(std::move(vocab)),
      topic_word_(std::move(topic_word_counts)) {
  params_.validate();
  if (topic_word_.size() != params_.topics * vocab_.size()) {
    throw DataError("topic-word count matrix does not match K x V");
  }
  index_.reserve(vocab_.size());
  for (std::size_t v = 0; v < vocab_.size(); ++v) {
    if (!index_.emplace(vocab_[v], v).second) throw DataError("duplicate vocabulary entry '" + vocab_[v] + "'");
  }
  topic_totals_.assign(params_.topics, 0);
  for (std::size_t k = 0; k < params_.topics; ++k) {
    for (std::size_t v = 0; v < vocab_.size(); ++v) topic_totals_[k] += count(k, v);
  }
}

std::optional<std::size_t> LdaModel::word_index(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool LdaModel::consistent() const noexcept {
  if (topic_word_.size() != params_.topics * vocab_.size()) return false;
  if (topic_totals_.size() != params_.topics) return false;
  for (std::size_t k = 0; k < params_.topics; ++k) {
    std::uint64_t sum = 0;
    for (std::size_t v = 0; v < vocab_.size(); ++v) sum += count(k, v);
    if (sum != topic_totals_[k]) return false;
  }
  return index_.size() == vocab_.size();
}

nlohmann::json LdaModel::to_json() const {
  nlohmann::json j;
  j["format"] = "absaug-lda";
  j["version"] = kFormatVersion;
  j["topics"] = params_.topics;
  j["alpha"] = params_.alpha;
  j["beta"] = params_.beta;
  j["iterations"] = params_.iterations;
  j["seed"] = params_.seed;
  j["stopwords"] = tokenizer_.stopwords();
  j["vocab"] = vocab_;
  auto rows = nlohmann::json::array();
  for (std::size_t k = 0; k < params_.topics; ++k) {
    const auto first = topic_word_.begin() + static_cast<std::ptrdiff_t>(k * vocab_.size());
    rows.push_back(std::vector<std::uint32_t>(first, first + static_cast<std::ptrdiff_t>(vocab_.size())));
  }
  j["topic_word_counts"] = std::move(rows);
  return j;
}

LdaModel LdaModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "absaug-lda") throw DataError("not an absaug LDA model");
    if (j.at("version").get<int>() != kFormatVersion) {
      throw DataError("unsupported LDA model version " + j.at("version").dump());
    }
    LdaParams params;
    params.topics = j.at("topics").get<std::size_t>();
    params.alpha = j.at("alpha").get<double>();
    params.beta = j.at("beta").get<double>();
    params.iterations = j.at("iterations").get<std::size_t>();
    params.seed = j.at("seed").get<std::uint64_t>();
    auto stopwords = j.at("stopwords").get<std::set<std::string, std::less<>>>();
    auto vocab = j.at("vocab").get<std::vector<std::string>>();
    const auto& rows = j.at("topic_word_counts");
    if (!rows.is_array() || rows.size() != params.topics) {
      throw DataError("topic_word_counts must have one row per topic");
    }
    std::vector<std::uint32_t> counts;
    counts.reserve(params.topics * vocab.size());
    for (const auto& row : rows) {
      auto r = row.get<std::vector<std::uint32_t>>();
      if (r.size() != vocab.size()) throw DataError("topic_word_counts row length != vocab size");
      counts.insert(counts.end(), r.begin(), r.end());
    }
    return LdaModel(params, Tokenizer(std::move(stopwords)), std::move(vocab), std::move(counts));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid LDA model: ") + e.what());
  }
}

void LdaModel::save(const std::filesystem::path& path) const {
  write_file(path, to_json().dump() + "\n");
}

LdaModel LdaModel::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed LDA model file '" + path.string() + "': " + e.what(), 0, e.byte);
  }
  return from_json(j);
}

bool LdaModel::operator==(const LdaModel& other) const {
  return params_.topics == other.params_.topics && params_.alpha == other.params_.alpha &&
         params_.beta == other.params_.beta && params_.iterations == other.params_.iterations &&
         params_.seed == other.params_.seed && tokenizer_ == other.tokenizer_ &&
         vocab_ == other.vocab_ && topic_word_ == other.topic_word_;
}

// ---------------------------------------------------------------------------
// LdaSampler

LdaSampler::LdaSampler(std::span<const std::string> corpus, const LdaParams& params,
                       Tokenizer tokenizer)
    : params_(params), tokenizer_(std::move(tokenizer)), rng_(params.seed) {
  params_.validate();
  if (corpus.empty()) throw DataError("cannot fit LDA on an empty corpus");

  std::unordered_map<std::string, std::uint32_t> index;
  num_docs_ = corpus.size();
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (auto& tok : tokenizer_.tokenize(corpus[d])) {
      auto [it, inserted] = index.emplace(tok, static_cast<std::uint32_t>(vocab_.size()));
      if (inserted) vocab_.push_back(std::move(tok));
      words_.push_back(it->second);
      docs_.push_back(static_cast<std::uint32_t>(d));
    }
  }
  if (words_.empty()) throw DataError("LDA corpus has no in-vocabulary tokens after tokenization");

  const std::size_t K = params_.topics;
  const std::size_t V = vocab_.size();
  topic_word_.assign(K * V, 0);
  topic_totals_.assign(K, 0);
  doc_topic_.assign(num_docs_ * K, 0);
  weights_.assign(K, 0.0);
  topics_.resize(words_.size());
  for (std::size_t t = 0; t < words_.size(); ++t) {
    const auto k = static_cast<std::uint32_t>(rng_.uniform_index(K));
    topics_[t] = k;
    ++topic_word_[k * V + words_[t]];
    ++topic_totals_[k];
    ++doc_topic_[docs_[t] * K + k];
  }
}

void LdaSampler::sweep() {
  const std::size_t K = params_.topics;
  const std::size_t V = vocab_.size();
  const double vbeta = static_cast<double>(V) * params_.beta;

  for (std::size_t t = 0; t < words_.size(); ++t) {
    const std::size_t w = words_[t];
    const std::size_t d = docs_[t];
    std::size_t k = topics_[t];
    --topic_word_[k * V + w];
    --topic_totals_[k];
    --doc_topic_[d * K + k];

    for (std::size_t j = 0; j < K; ++j) {
      weights_[j] = (doc_topic_[d * K + j] + params_.alpha) *
                    (topic_word_[j * V + w] + params_.beta) /
                    (static_cast<double>(topic_totals_[j]) + vbeta);
    }
    k = sample_topic(weights_, rng_);

    topics_[t] = static_cast<std::uint32_t>(k);
    ++topic_word_[k * V + w];
    ++topic_totals_[k];
    ++doc_topic_[d * K + k];
  }
  ++sweeps_;
}

bool LdaSampler::counts_consistent() const {
  const std::size_t K = params_.topics;
  const std::size_t V = vocab_.size();
  std::vector<std::uint32_t> tw(K * V, 0);
  std::vector<std::uint64_t> tt(K, 0);
  std::vector<std::uint32_t> dt(num_docs_ * K, 0);
  for (std::size_t t = 0; t < words_.size(); ++t) {
    ++tw[topics_[t] * V + words_[t]];
    ++tt[topics_[t]];
    ++dt[docs_[t] * K + topics_[t]];
  }
  if (tw != topic_word_ || tt != topic_totals_ || dt != doc_topic_) return false;
  for (std::size_t k = 0; k < K; ++k) {
    std::uint64_t row = 0;
    for (std::size_t v = 0; v < V; ++v) row += topic_word_[k * V + v];
    if (row != topic_totals_[k]) return false;
  }
  return true;
}

LdaModel LdaSampler::freeze() const {
  return LdaModel(params_, tokenizer_, vocab_, topic_word_);
}

LdaModel fit_lda(std::span<const std::string> corpus, const LdaParams& params,
                 Tokenizer tokenizer) {
  LdaSampler sampler(corpus, params, std::move(tokenizer));
  for (std::size_t i = 0; i < params.iterations; ++i) sampler.sweep();
  return sampler.freeze();
}

// ---------------------------------------------------------------------------
// Inference

TopicVector infer(const LdaModel& model, std::string_view doc, std::size_t fold_in_iterations) {
  const std::size_t K = model.topics();
  const auto& p = model.params();

  std::vector<std::size_t> words;
  std::string key;
  for (const auto& tok : model.tokenizer().tokenize(doc)) {
    if (auto v = model.word_index(tok)) {
      words.push_back(*v);
      key += tok;
      key += ' ';
    }
  }
  if (words.empty()) return TopicVector{std::vector<double>(K, 1.0 / static_cast<double>(K))};

  Rng rng(splitmix64(p.seed ^ fnv1a64(key)));
  std::vector<std::uint32_t> topics(words.size());
  std::vector<std::uint32_t> doc_topic(K, 0);
  for (std::size_t t = 0; t < words.size(); ++t) {
    topics[t] = static_cast<std::uint32_t>(rng.uniform_index(K));
    ++doc_topic[topics[t]];
  }

  const double vbeta = static_cast<double>(model.vocab_size()) * p.beta;
  std::vector<double> weights(K);
  for (std::size_t it = 0; it < fold_in_iterations; ++it) {
    for (std::size_t t = 0; t < words.size(); ++t) {
      --doc_topic[topics[t]];
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = (doc_topic[k] + p.alpha) * (model.count(k, words[t]) + p.beta) /
                     (static_cast<double>(model.topic_totals()[k]) + vbeta);
      }
      topics[t] = static_cast<std::uint32_t>(sample_topic(weights, rng));
      ++doc_topic[topics[t]];
    }
  }

  // Posterior-mean proportions, then the explicit renormalization z_k = theta_k / sum(theta).
  const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * p.alpha;
  std::vector<double> theta(K);
  for (std::size_t k = 0; k < K; ++k) theta[k] = (doc_topic[k] + p.alpha) / denom;
  const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  for (auto& x : theta) x /= sum;
  return TopicVector{std::move(theta)};
}

double relevance(const TopicVector& a, const TopicVector& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw DataError("relevance needs two topic vectors of the same non-zero length");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw DataError("relevance of a zero topic vector");
  return std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb)));
}

}  // namespace absaug
