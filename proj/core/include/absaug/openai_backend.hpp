#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absaug/llm_gateway.hpp"

namespace absaug {

struct OpenAIOptions {
  /// scheme://host[:port][/prefix]; "/v1/chat/completions" is appended unless the
  /// prefix already ends in "/v1".
  std::string base_url = "https://api.openai.com";
  std::string model;
  /// Name of the environment variable holding the API key. Empty disables auth.
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{120};
  /// top_k is not part of the official schema; vLLM and similar servers accept it.
  bool send_top_k = true;
};

/// OpenAI-compatible POST /v1/chat/completions client.
class OpenAIBackend : public Backend {
 public:
  explicit OpenAIBackend(OpenAIOptions options);

  std::string id() const override;
  std::vector<std::string> complete(const GenRequest& request) override;
  bool concurrent() const override { return true; }

  const OpenAIOptions& options() const noexcept { return options_; }

 private:
  OpenAIOptions options_;
  std::string scheme_host_port_;
  std::string path_;
};

nlohmann::json build_chat_request(const OpenAIOptions& options, const GenRequest& request);

/// choices[].message.content in order; throws GatewayError on a malformed body.
std::vector<std::string> parse_chat_response(std::string_view body, const std::string& backend_id);

}  // namespace absaug
