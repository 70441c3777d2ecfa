#include "absaug/openai_backend.hpp"

#include <cstdlib>

#include "absaug/errors.hpp"

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace absaug {
namespace {

constexpr std::size_t kExcerpt = 300;

bool retryable_status(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

}  // namespace

OpenAIBackend::OpenAIBackend(OpenAIOptions options) : options_(std::move(options)) {
  const auto& url = options_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url must start with http:// or https://: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (prefix.size() < 3 || prefix.compare(prefix.size() - 3, 3, "/v1") != 0) prefix += "/v1";
  path_ = prefix + "/chat/completions";
  if (options_.model.empty()) throw ConfigError("openai backend needs a model name");
}

std::string OpenAIBackend::id() const { return "openai:" + options_.model + "@" + scheme_host_port_; }

nlohmann::json build_chat_request(const OpenAIOptions& options, const GenRequest& request) {
  nlohmann::json body;
  body["model"] = options.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["n"] = request.n_samples;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (options.send_top_k) body["top_k"] = request.top_k;
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

std::vector<std::string> parse_chat_response(std::string_view body, const std::string& backend_id) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw GatewayError("malformed response body: " + std::string(e.what()), backend_id);
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array()) {
    throw GatewayError("response has no choices array", backend_id);
  }
  std::vector<std::string> out;
  for (const auto& choice : j["choices"]) {
    const auto msg = choice.find("message");
    if (msg == choice.end() || !msg->is_object()) continue;
    const auto content = msg->find("content");
    if (content != msg->end() && content->is_string()) out.push_back(content->get<std::string>());
  }
  return out;
}

std::vector<std::string> OpenAIBackend::complete(const GenRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto seconds = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);

  httplib::Headers headers;
  if (!options_.api_key_env.empty()) {
    if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const auto payload = build_chat_request(options_, request).dump();
  auto res = client.Post(path_, headers, payload, "application/json");
  if (!res) {
    throw GatewayError("transport failure: " + httplib::to_string(res.error()), id(), std::nullopt,
                       true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw GatewayError("HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, kExcerpt),
                       id(), res->status, retryable_status(res->status));
  }
  return parse_chat_response(res->body, id());
}

}  // namespace absaug
