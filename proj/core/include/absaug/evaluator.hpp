#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "absaug/corpus.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/polarity.hpp"

namespace absaug {

/// Rows: gold label. Columns: predicted label, with unparseable as the fourth column.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 4>, 3> cells{};

  void add(Polarity gold, Prediction predicted) noexcept {
    ++cells[index_of(gold)][static_cast<std::size_t>(predicted)];
  }
  std::size_t total() const noexcept;
  std::size_t correct() const noexcept;

  bool operator==(const ConfusionMatrix&) const = default;
};

struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> per_label_f1{};

  nlohmann::ordered_json to_json() const;
  /// Aligned-column text rendering.
  std::string to_table() const;
};

/// Metrics from a confusion matrix. Zero denominators give 0.
EvalReport evaluate_confusion(const ConfusionMatrix& confusion);

using LabeledPrediction = std::pair<std::string, Prediction>;

/// Throws DataError when gold ids repeat or predictions miss / add ids.
EvalReport evaluate(const Dataset& gold, std::span<const LabeledPrediction> predictions);

struct PredictionFailure {
  std::string source_id;
  std::string message;
};

struct PredictionRun {
  std::vector<LabeledPrediction> predictions;
  std::vector<PredictionFailure> failures;
};

/// One prediction per instance in order; failures are collected, not thrown.
PredictionRun predict_split(const Dataset& test, const Gateway& gateway);

/// {"source_id","prediction"} per line.
std::string write_predictions_jsonl(std::span<const LabeledPrediction> predictions);
std::vector<LabeledPrediction> read_predictions_jsonl(std::string_view bytes);

}  // namespace absaug
