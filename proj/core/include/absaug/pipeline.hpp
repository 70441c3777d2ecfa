#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absaug/config.hpp"
#include "absaug/corpus.hpp"
#include "absaug/errors.hpp"
#include "absaug/llm_gateway.hpp"

namespace absaug {

/// Wraps a failure with the name of the stage it happened in.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineFiles {
  std::filesystem::path base;         // original or balanced set
  std::filesystem::path candidates;
  std::filesystem::path lda_model;
  std::filesystem::path scored;
  std::filesystem::path preferences;
  std::filesystem::path skips;
  std::filesystem::path merged;
  std::filesystem::path sft;
  std::filesystem::path manifest;

  static PipelineFiles in(const std::filesystem::path& dir);
};

struct PipelineSummary {
  PipelineFiles files;
  std::size_t base_size = 0;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  std::size_t augmentation_fallbacks = 0;
  std::size_t sft_records = 0;
};

/// Unique original sentences in first-occurrence order: the LDA fitting corpus.
std::vector<std::string> lda_corpus(const Dataset& d);

/// load -> balance (balanced setting) -> augment -> LDA fit -> score -> preferences
/// -> merged SFT set -> manifest. Failures are rethrown as StageError.
PipelineSummary run_pipeline(const PipelineConfig& config, const Gateway& augmenter,
                             const Gateway& reward_model, std::string timestamp = {});

}  // namespace absaug
