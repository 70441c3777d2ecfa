#include "absaug/augmenter.hpp"

#include <cctype>
#include <cmath>

#include "absaug/errors.hpp"
#include "absaug/jsonl.hpp"
#include "absaug/log.hpp"

namespace absaug {
namespace {

constexpr std::string_view kTemplateHead =
    "You are a text enhancer designed to optimize text specifically for aspect-based sentiment "
    "analysis (ABSA) models by enriching, clarifying, and standardizing content. Your goal is to "
    "enhance the given sentence by improving grammar, resolving ambiguities, and inferring missing "
    "information, thereby boosting the ABSA model's performance. Given an original sentence, a "
    "specific aspect term within that sentence, and the sentiment associated with that aspect "
    "term (Positive, Negative, or Neutral), generate a new sentence that:\n"
    "1. Clearly includes the provided aspect term.\n"
    "2. Retains the original sentiment toward the aspect term.\n"
    "3. Is close in length to the original sentence.\n"
    "4. Contains only the enhanced sentence without any additional explanation or irrelevant "
    "content.\n"
    "5. Don't annotate (like Here is the enhanced sentence:), do not explain, just output "
    "enhanced text.\n"
    "The given sentence, aspect-term, and sentiment are the following:\n";

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

GenRequest request_for(const Instance& inst, std::size_t n, const SamplingConfig& sampling,
                       std::size_t ordinal) {
  GenRequest req;
  req.prompt = build_prompt(inst);
  req.n_samples = n;
  req.temperature = sampling.temperature;
  req.top_k = sampling.top_k;
  req.max_tokens = sampling.max_tokens;
  if (sampling.seed) req.seed = *sampling.seed + static_cast<std::int64_t>(ordinal);
  return req;
}

CandidatePool to_pool(const Instance& inst, const GenResponse& response) {
  CandidatePool pool;
  pool.reserve(response.completions.size());
  for (const auto& text : response.completions) pool.push_back(validate_candidate(inst, text));
  return pool;
}

}  // namespace

std::string_view to_string(RejectionReason r) noexcept {
  switch (r) {
    case RejectionReason::missing_aspect: return "missing_aspect";
    case RejectionReason::empty: return "empty";
    case RejectionReason::boilerplate: return "boilerplate";
  }
  return "empty";
}

std::optional<RejectionReason> parse_rejection_reason(std::string_view s) noexcept {
  for (auto r : {RejectionReason::missing_aspect, RejectionReason::empty,
                 RejectionReason::boilerplate}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string build_prompt(const Instance& inst) {
  std::string p{kTemplateHead};
  p += "Sentence: \"" + quote_field(inst.sentence) + "\"\n";
  p += "Aspect: \"" + quote_field(inst.aspect) + "\"\n";
  p += "Sentiment: \"" + std::string(capitalized(inst.label)) + "\"";
  return p;
}

std::string_view strip_boilerplate(std::string_view text) noexcept {
  for (auto prefix : kBoilerplatePrefixes) {
    if (starts_with_ci(text, prefix)) return trim(text.substr(prefix.size()));
  }
  return text;
}

AugmentedCandidate validate_candidate(const Instance& source, std::string_view raw) {
  AugmentedCandidate c{source, {}, false, std::nullopt};
  const auto text = trim(raw);
  if (text.empty()) {
    c.rejection_reason = RejectionReason::empty;
    return c;
  }
  const auto body = strip_boilerplate(text);
  c.text = std::string(body);
  if (body.empty()) {
    c.rejection_reason = RejectionReason::boilerplate;
    return c;
  }
  if (!contains_ci(body, source.aspect)) {
    c.rejection_reason = RejectionReason::missing_aspect;
    return c;
  }
  c.valid = true;

  const auto len = static_cast<double>(source.sentence.size());
  if (std::abs(static_cast<double>(body.size()) - len) > 2.0 * len) {
    log::warn("candidate for '" + source.source_id + "' differs in length by more than 2x (" +
              std::to_string(body.size()) + " vs " + std::to_string(source.sentence.size()) + ")");
  }
  return c;
}

CandidatePool augment(const Instance& instance, std::size_t n, const Gateway& gateway,
                      const SamplingConfig& sampling) {
  if (n == 0) throw ConfigError("number of candidates must be >= 1");
  return to_pool(instance, gateway.generate(request_for(instance, n, sampling, 0)));
}

std::vector<CandidatePool> augment_all(const Dataset& d, std::size_t n, const Gateway& gateway,
                                       const SamplingConfig& sampling) {
  if (n == 0) throw ConfigError("number of candidates must be >= 1");
  std::vector<GenRequest> requests;
  requests.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    requests.push_back(request_for(d.instances[i], n, sampling, i));
  }
  auto responses = gateway.generate_all(requests);

  std::vector<CandidatePool> pools;
  pools.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    pools.push_back(to_pool(d.instances[i], responses[i].get()));
  }
  return pools;
}

std::string write_candidates_jsonl(std::span<const CandidatePool> pools) {
  std::string out;
  for (const auto& pool : pools) {
    for (const auto& c : pool) {
      nlohmann::ordered_json j;
      j["source_id"] = c.source.source_id;
      j["text"] = c.text;
      j["valid"] = c.valid;
      j["rejection_reason"] =
          c.rejection_reason ? nlohmann::ordered_json(to_string(*c.rejection_reason)) : nlohmann::ordered_json(nullptr);
      append_jsonl(out, j);
    }
  }
  return out;
}

std::vector<CandidatePool> read_candidates_jsonl(std::string_view bytes, const Dataset& d) {
  std::vector<AugmentedCandidate> flat;
  std::vector<std::size_t> lines;
  for_each_jsonl(bytes, [&](const nlohmann::json& obj, std::size_t line) {
    const auto where = " at line " + std::to_string(line);
    for (const char* key : {"source_id", "text", "valid", "rejection_reason"}) {
      if (!obj.contains(key)) throw DataError(std::string("missing key '") + key + "'" + where);
    }
    AugmentedCandidate c;
    c.source.source_id = obj["source_id"].get<std::string>();
    c.text = obj["text"].get<std::string>();
    c.valid = obj["valid"].get<bool>();
    if (!obj["rejection_reason"].is_null()) {
      const auto r = obj["rejection_reason"].get<std::string>();
      c.rejection_reason = parse_rejection_reason(r);
      if (!c.rejection_reason) throw DataError("invalid rejection_reason '" + r + "'" + where);
    }
    if (c.valid == c.rejection_reason.has_value()) {
      throw DataError("valid and rejection_reason disagree" + where);
    }
    flat.push_back(std::move(c));
    lines.push_back(line);
  });

  if (d.empty()) {
    if (!flat.empty()) throw DataError("candidates given for an empty dataset");
    return {};
  }
  if (flat.size() % d.size() != 0 || flat.empty()) {
    throw DataError(std::to_string(flat.size()) + " candidates do not split evenly over " +
                    std::to_string(d.size()) + " instances");
  }
  const std::size_t n = flat.size() / d.size();
  std::vector<CandidatePool> pools(d.size());
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const auto& inst = d.instances[k / n];
    if (flat[k].source.source_id != inst.source_id) {
      throw DataError("candidate at line " + std::to_string(lines[k]) + " has source_id '" +
                      flat[k].source.source_id + "', expected '" + inst.source_id + "'");
    }
    flat[k].source = inst;
    pools[k / n].push_back(std::move(flat[k]));
  }
  return pools;
}

}  // namespace absaug
