#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "absaug/augmenter.hpp"
#include "absaug/balancer.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/openai_backend.hpp"
#include "absaug/preference.hpp"
#include "absaug/topic_model.hpp"

namespace absaug {

enum class BackendKind : std::uint8_t { mock, openai };

struct BackendConfig {
  BackendKind kind = BackendKind::mock;
  OpenAIOptions openai;
  std::filesystem::path mock_script;
  GatewayOptions gateway;
  SamplingConfig sampling;
};

/// Everything a pipeline run depends on. See README for the file schema.
struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "absaug-out";
  Setting setting = Setting::standard;
  std::uint64_t seed = 42;
  std::size_t n_candidates = 5;
  SelectionMode selection = SelectionMode::both;

  LdaParams lda;
  std::size_t fold_in_iterations = kDefaultFoldInIterations;
  std::filesystem::path stopwords;

  BackendConfig augmenter;
  BackendConfig reward_model;

  PipelineConfig();

  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected. Relative paths are
/// resolved against base_dir.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// The flattened view recorded in run manifests.
nlohmann::ordered_json describe(const PipelineConfig& config);
nlohmann::ordered_json describe(const BackendConfig& backend, bool prediction);

std::shared_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace absaug
