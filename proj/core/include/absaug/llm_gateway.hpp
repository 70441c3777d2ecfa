#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/polarity.hpp"

namespace absaug {

struct GenRequest {
  std::string prompt;
  std::size_t n_samples = 1;
  double temperature = 1.0;
  std::size_t top_k = 50;
  std::size_t max_tokens = 256;
  std::optional<std::int64_t> seed;

  /// Throws ConfigError on n_samples == 0, max_tokens == 0 or negative temperature.
  void validate() const;
};

struct GenResponse {
  std::vector<std::string> completions;
  std::string backend_id;
};

/// A text-generation endpoint. Implementations may return fewer completions than
/// requested; the Gateway tops them up. Throw GatewayError on failure.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string id() const = 0;
  virtual std::vector<std::string> complete(const GenRequest& request) = 0;

  /// Whether complete() may be called from several threads at once.
  virtual bool concurrent() const { return false; }
};

/// Value-or-error slot for batched calls; errors stay attached to their index.
template <class T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;

  bool ok() const noexcept { return value.has_value(); }

  const T& get() const {
    if (error) std::rethrow_exception(error);
    return *value;
  }
};

struct GatewayOptions {
  /// Re-attempts after the first try, for retryable transport errors and empty completions.
  std::size_t retries = 3;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds backoff{200};
  /// Generation budget for sentiment prediction.
  std::size_t prediction_max_tokens = 16;
};

struct PredictRequest {
  std::string sentence;
  std::string aspect;
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

  /// Exactly n_samples trimmed, non-empty completions in sample order.
  GenResponse generate(const GenRequest& request) const;

  /// Runs requests with at most max_in_flight in flight; results are indexed like the input.
  std::vector<Outcome<GenResponse>> generate_all(std::span<const GenRequest> requests) const;

  Prediction predict_sentiment(std::string_view sentence, std::string_view aspect) const;

  std::vector<Outcome<Prediction>> predict_all(std::span<const PredictRequest> requests) const;

  const std::string& backend_id() const noexcept { return backend_id_; }
  const GatewayOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<Backend> backend_;
  GatewayOptions options_;
  std::string backend_id_;
};

inline constexpr std::string_view kAbsaInstruction =
    "Predict the sentiment of the given aspect in the text.";

/// Instruction line, blank line, then Text / Aspect / Sentiment fields.
std::string build_absa_prompt(std::string_view sentence, std::string_view aspect);

/// Scans the first line of a completion for whole-word label keywords, ignoring case.
/// Exactly one distinct keyword yields that label; zero or several yield unparseable.
Prediction parse_prediction(std::string_view completion) noexcept;

/// Escapes backslashes and double quotes so a field can sit inside "...".
std::string quote_field(std::string_view field);

/// Runs fn(i) for i in [0, n) on up to `limit` worker threads.
template <class Fn>
void parallel_for(std::size_t n, std::size_t limit, Fn&& fn);

}  // namespace absaug

#include "absaug/detail/parallel_for.hpp"
