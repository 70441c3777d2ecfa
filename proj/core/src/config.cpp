#include "absaug/config.hpp"

#include <set>

#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"
#include "absaug/mock_backend.hpp"

namespace absaug {
namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + where + key + "' has the wrong type: " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

BackendConfig parse_backend(const json& obj, BackendConfig cfg, const std::string& where,
                            const std::filesystem::path& base) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  reject_unknown(obj,
                 {"backend", "base_url", "model", "api_key_env", "timeout_seconds", "send_top_k",
                  "mock_script", "retries", "max_in_flight", "backoff_ms", "temperature", "top_k",
                  "max_tokens", "seed", "prediction_max_tokens"},
                 where + ".");
  const auto w = where + ".";
  std::string kind = cfg.kind == BackendKind::mock ? "mock" : "openai";
  read(obj, "backend", kind, w);
  if (kind == "mock") {
    cfg.kind = BackendKind::mock;
  } else if (kind == "openai") {
    cfg.kind = BackendKind::openai;
  } else {
    throw ConfigError("config key '" + w + "backend' must be \"mock\" or \"openai\"");
  }
  read(obj, "base_url", cfg.openai.base_url, w);
  read(obj, "model", cfg.openai.model, w);
  read(obj, "api_key_env", cfg.openai.api_key_env, w);
  read(obj, "send_top_k", cfg.openai.send_top_k, w);
  std::int64_t timeout = cfg.openai.timeout.count();
  read(obj, "timeout_seconds", timeout, w);
  cfg.openai.timeout = std::chrono::seconds(timeout);
  std::string script;
  read(obj, "mock_script", script, w);
  if (!script.empty()) cfg.mock_script = resolve(base, script);
  read(obj, "retries", cfg.gateway.retries, w);
  read(obj, "max_in_flight", cfg.gateway.max_in_flight, w);
  std::int64_t backoff = cfg.gateway.backoff.count();
  read(obj, "backoff_ms", backoff, w);
  cfg.gateway.backoff = std::chrono::milliseconds(backoff);
  read(obj, "prediction_max_tokens", cfg.gateway.prediction_max_tokens, w);
  read(obj, "temperature", cfg.sampling.temperature, w);
  read(obj, "top_k", cfg.sampling.top_k, w);
  read(obj, "max_tokens", cfg.sampling.max_tokens, w);
  if (obj.contains("seed")) {
    if (obj["seed"].is_null()) {
      cfg.sampling.seed.reset();
    } else {
      std::int64_t seed = 0;
      read(obj, "seed", seed, w);
      cfg.sampling.seed = seed;
    }
  }
  return cfg;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  augmenter.sampling.temperature = 1.0;
  augmenter.sampling.top_k = 50;
  augmenter.sampling.max_tokens = 256;
  reward_model.sampling.temperature = 0.0;
  reward_model.sampling.top_k = 1;
  reward_model.sampling.max_tokens = reward_model.gateway.prediction_max_tokens;
}

void PipelineConfig::validate() const {
  if (input.empty()) throw ConfigError("no input dataset configured");
  if (n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
  lda.validate();
  for (const auto* b : {&augmenter, &reward_model}) {
    if (b->kind == BackendKind::mock && b->mock_script.empty()) {
      throw ConfigError("mock backend needs a mock_script");
    }
    if (b->kind == BackendKind::openai && b->openai.model.empty()) {
      throw ConfigError("openai backend needs a model");
    }
  }
}

PipelineConfig parse_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"input", "output_dir", "setting", "seed", "n_candidates", "selection", "lda",
                  "augmenter", "reward_model"},
                 "");
  PipelineConfig cfg;
  std::string s;
  read(doc, "input", s, "");
  cfg.input = resolve(base, s);
  s.clear();
  read(doc, "output_dir", s, "");
  if (!s.empty()) cfg.output_dir = resolve(base, s);
  s.clear();
  read(doc, "setting", s, "");
  if (!s.empty()) {
    auto setting = parse_setting(s);
    if (!setting) throw ConfigError("setting must be \"standard\" or \"balanced\"");
    cfg.setting = *setting;
  }
  read(doc, "seed", cfg.seed, "");
  read(doc, "n_candidates", cfg.n_candidates, "");
  s.clear();
  read(doc, "selection", s, "");
  if (!s.empty()) {
    if (s == "both") {
      cfg.selection = SelectionMode::both;
    } else if (s == "sentiment_only") {
      cfg.selection = SelectionMode::sentiment_only;
    } else if (s == "topic_only") {
      cfg.selection = SelectionMode::topic_only;
    } else {
      throw ConfigError("selection must be both, sentiment_only or topic_only");
    }
  }
  if (auto it = doc.find("lda"); it != doc.end()) {
    const auto& lda = *it;
    if (!lda.is_object()) throw ConfigError("config section 'lda' must be an object");
    reject_unknown(lda,
                   {"topics", "alpha", "beta", "iterations", "seed", "fold_in_iterations",
                    "stopwords"},
                   "lda.");
    read(lda, "topics", cfg.lda.topics, "lda.");
    read(lda, "alpha", cfg.lda.alpha, "lda.");
    read(lda, "beta", cfg.lda.beta, "lda.");
    read(lda, "iterations", cfg.lda.iterations, "lda.");
    read(lda, "seed", cfg.lda.seed, "lda.");
    read(lda, "fold_in_iterations", cfg.fold_in_iterations, "lda.");
    std::string stop;
    read(lda, "stopwords", stop, "lda.");
    cfg.stopwords = resolve(base, stop);
  }
  if (auto it = doc.find("augmenter"); it != doc.end()) {
    cfg.augmenter = parse_backend(*it, cfg.augmenter, "augmenter", base);
  }
  if (auto it = doc.find("reward_model"); it != doc.end()) {
    cfg.reward_model = parse_backend(*it, cfg.reward_model, "reward_model", base);
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("malformed config '" + path.string() + "': " + e.what(), 0, e.byte);
  }
  return parse_config(doc, path.parent_path());
}

nlohmann::ordered_json describe(const BackendConfig& b, bool prediction) {
  nlohmann::ordered_json j;
  j["backend"] = b.kind == BackendKind::mock ? "mock" : "openai";
  if (b.kind == BackendKind::mock) {
    j["mock_script"] = b.mock_script.filename().string();
  } else {
    j["base_url"] = b.openai.base_url;
    j["model"] = b.openai.model;
    j["api_key_env"] = b.openai.api_key_env;
    j["send_top_k"] = b.openai.send_top_k;
  }
  j["retries"] = b.gateway.retries;
  j["max_in_flight"] = b.gateway.max_in_flight;
  if (prediction) {
    j["temperature"] = 0.0;
    j["top_k"] = 1;
    j["max_tokens"] = b.gateway.prediction_max_tokens;
  } else {
    j["temperature"] = b.sampling.temperature;
    j["top_k"] = b.sampling.top_k;
    j["max_tokens"] = b.sampling.max_tokens;
  }
  return j;
}

nlohmann::ordered_json describe(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["input"] = c.input.filename().string();
  j["setting"] = to_string(c.setting);
  j["n_candidates"] = c.n_candidates;
  j["selection"] = to_string(c.selection);
  j["lda_K"] = c.lda.topics;
  j["lda_alpha"] = c.lda.alpha;
  j["lda_beta"] = c.lda.beta;
  j["lda_iterations"] = c.lda.iterations;
  j["lda_fold_in_iterations"] = c.fold_in_iterations;
  j["lda_stopwords"] = c.stopwords.empty() ? std::string("builtin") : c.stopwords.filename().string();
  j["augmenter"] = describe(c.augmenter, false);
  j["reward_model"] = describe(c.reward_model, true);
  return j;
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::mock) {
    if (config.mock_script.empty()) throw ConfigError("mock backend needs a mock_script");
    return std::make_shared<MockBackend>(MockBackend::load(config.mock_script));
  }
  return std::make_shared<OpenAIBackend>(config.openai);
}

}  // namespace absaug
