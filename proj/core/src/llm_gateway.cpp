#include "absaug/llm_gateway.hpp"

#include <cctype>
#include <cmath>
#include <thread>
#include <utility>

#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"

namespace absaug {
namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

void GenRequest::validate() const {
  if (n_samples == 0) throw ConfigError("n_samples must be >= 1");
  if (max_tokens == 0) throw ConfigError("max_tokens must be >= 1");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be a finite value >= 0");
  }
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {
  if (!backend_) throw ConfigError("gateway needs a backend");
  backend_id_ = backend_->id();
}

GenResponse Gateway::generate(const GenRequest& request) const {
  request.validate();

  GenResponse response{{}, backend_id_};
  response.completions.reserve(request.n_samples);
  std::string last_error;
  std::size_t attempts = 0;

  while (response.completions.size() < request.n_samples) {
    if (attempts > options_.retries) {
      const auto detail = last_error.empty() ? std::string("empty completions") : last_error;
      throw GatewayError("backend '" + backend_id_ + "' failed after " + std::to_string(attempts) +
                             " attempts: " + detail,
                         backend_id_);
    }
    if (attempts > 0 && options_.backoff.count() > 0) {
      std::this_thread::sleep_for(options_.backoff * (1 << std::min<std::size_t>(attempts - 1, 6)));
    }
    ++attempts;

    GenRequest sub = request;
    sub.n_samples = request.n_samples - response.completions.size();
    try {
      for (auto& raw : backend_->complete(sub)) {
        auto text = trim(raw);
        if (text.empty()) continue;
        if (response.completions.size() == request.n_samples) break;
        response.completions.emplace_back(text);
      }
    } catch (const GatewayError& e) {
      if (!e.retryable()) throw;
      last_error = e.what();
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw GatewayError(std::string("backend '") + backend_id_ + "': " + e.what(), backend_id_);
    }
  }
  return response;
}

std::vector<Outcome<GenResponse>> Gateway::generate_all(
    std::span<const GenRequest> requests) const {
  std::vector<Outcome<GenResponse>> results(requests.size());
  const std::size_t limit = backend_->concurrent() ? options_.max_in_flight : 1;
  parallel_for(requests.size(), limit, [&](std::size_t i) {
    try {
      results[i].value = generate(requests[i]);
    } catch (...) {
      results[i].error = std::current_exception();
    }
  });
  return results;
}

Prediction Gateway::predict_sentiment(std::string_view sentence, std::string_view aspect) const {
  if (trim(sentence).empty() || trim(aspect).empty()) {
    throw DataError("prediction needs a non-empty sentence and aspect");
  }
  GenRequest req;
  req.prompt = build_absa_prompt(sentence, aspect);
  req.n_samples = 1;
  req.temperature = 0.0;
  req.top_k = 1;
  req.max_tokens = options_.prediction_max_tokens;
  return parse_prediction(generate(req).completions.front());
}

std::vector<Outcome<Prediction>> Gateway::predict_all(
    std::span<const PredictRequest> requests) const {
  std::vector<Outcome<Prediction>> results(requests.size());
  const std::size_t limit = backend_->concurrent() ? options_.max_in_flight : 1;
  parallel_for(requests.size(), limit, [&](std::size_t i) {
    try {
      results[i].value = predict_sentiment(requests[i].sentence, requests[i].aspect);
    } catch (...) {
      results[i].error = std::current_exception();
    }
  });
  return results;
}

std::string quote_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string build_absa_prompt(std::string_view sentence, std::string_view aspect) {
  std::string p;
  p += kAbsaInstruction;
  p += "\n\nText: \"";
  p += quote_field(sentence);
  p += "\"\nAspect: \"";
  p += quote_field(aspect);
  p += "\"\nSentiment:";
  return p;
}

Prediction parse_prediction(std::string_view completion) noexcept {
  completion = trim(completion);
  completion = completion.substr(0, completion.find('\n'));

  bool seen[3] = {false, false, false};
  std::size_t i = 0;
  while (i < completion.size()) {
    while (i < completion.size() && !std::isalpha(static_cast<unsigned char>(completion[i]))) ++i;
    const std::size_t start = i;
    while (i < completion.size() && std::isalpha(static_cast<unsigned char>(completion[i]))) ++i;
    const auto word = completion.substr(start, i - start);
    for (Polarity p : kPolarities) {
      if (iequals(word, to_string(p))) seen[index_of(p)] = true;
    }
  }

  const int distinct = int(seen[0]) + int(seen[1]) + int(seen[2]);
  if (distinct != 1) return Prediction::unparseable;
  for (Polarity p : kPolarities) {
    if (seen[index_of(p)]) return to_prediction(p);
  }
  return Prediction::unparseable;
}

}  // namespace absaug
