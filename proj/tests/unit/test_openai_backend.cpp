#include <doctest.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "absaug/errors.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/openai_backend.hpp"

using namespace absaug;

namespace {

/// Local chat-completions endpoint. The handler sees every request in arrival order.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        paths.push_back(req.path);
        bodies.push_back(req.body);
        auth.push_back(req.get_header_value("Authorization"));
      }
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

  std::vector<std::string> paths, bodies, auth;

 private:
  httplib::Server server_;
  Handler handler_;
  std::mutex mu_;
  int port_ = 0;
  std::thread thread_;
};

std::string chat_body(const std::vector<std::string>& contents) {
  nlohmann::json j;
  j["id"] = "chatcmpl-1";
  j["choices"] = nlohmann::json::array();
  for (std::size_t i = 0; i < contents.size(); ++i) {
    j["choices"].push_back({{"index", i},
                            {"message", {{"role", "assistant"}, {"content", contents[i]}}},
                            {"finish_reason", "stop"}});
  }
  return j.dump();
}

OpenAIOptions options_for(const std::string& url) {
  OpenAIOptions o;
  o.base_url = url;
  o.model = "test-model";
  o.api_key_env = "ABSAUG_TEST_API_KEY";
  o.timeout = std::chrono::seconds(5);
  return o;
}

GatewayOptions no_backoff() {
  GatewayOptions g;
  g.backoff = std::chrono::milliseconds(0);
  return g;
}

}  // namespace

TEST_SUITE("openai") {
  TEST_CASE("wire format: path, auth header and body fields") {
    ::setenv("ABSAUG_TEST_API_KEY", "sk-test", 1);
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(chat_body({" first ", "second"}), "application/json");
    });
    Gateway gw(std::make_shared<OpenAIBackend>(options_for(server.url())), no_backoff());
    GenRequest r;
    r.prompt = "Rewrite this.";
    r.n_samples = 2;
    r.temperature = 1.0;
    r.top_k = 50;
    r.max_tokens = 64;
    r.seed = 11;
    const auto out = gw.generate(r);
    CHECK(out.completions == std::vector<std::string>{"first", "second"});
    REQUIRE(server.paths.size() == 1);
    CHECK(server.paths[0] == "/v1/chat/completions");
    CHECK(server.auth[0] == "Bearer sk-test");
    const auto body = nlohmann::json::parse(server.bodies[0]);
    CHECK(body["model"] == "test-model");
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "Rewrite this.");
    CHECK(body["n"] == 2);
    CHECK(body["temperature"] == 1.0);
    CHECK(body["top_k"] == 50);
    CHECK(body["max_tokens"] == 64);
    CHECK(body["seed"] == 11);
    ::unsetenv("ABSAUG_TEST_API_KEY");
  }

  TEST_CASE("base_url prefixes ending in /v1 are not doubled") {
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(chat_body({"ok"}), "application/json");
    });
    OpenAIBackend backend(options_for(server.url("/proxy/v1/")));
    GenRequest r;
    r.prompt = "x";
    CHECK(backend.complete(r) == std::vector<std::string>{"ok"});
    CHECK(server.paths[0] == "/proxy/v1/chat/completions");
    CHECK(server.auth[0].empty());
  }

  TEST_CASE("5xx responses are retried, then succeed") {
    int calls = 0;
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      if (++calls <= 2) {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
        return;
      }
      res.set_content(chat_body({"finally"}), "application/json");
    });
    Gateway gw(std::make_shared<OpenAIBackend>(options_for(server.url())), no_backoff());
    GenRequest r;
    r.prompt = "x";
    CHECK(gw.generate(r).completions.front() == "finally");
    CHECK(calls == 3);
  }

  TEST_CASE("non-2xx client errors fail at once with status and body excerpt") {
    int calls = 0;
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 400;
      res.set_content(R"({"error":{"message":"bad model"}})", "application/json");
    });
    Gateway gw(std::make_shared<OpenAIBackend>(options_for(server.url())), no_backoff());
    GenRequest r;
    r.prompt = "x";
    try {
      gw.generate(r);
      FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
      CHECK(e.status() == 400);
      CHECK_FALSE(e.retryable());
      CHECK(std::string(e.what()).find("HTTP 400") != std::string::npos);
      CHECK(std::string(e.what()).find("bad model") != std::string::npos);
    }
    CHECK(calls == 1);
  }

  TEST_CASE("persistent 5xx gives up after the retry budget") {
    int calls = 0;
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 500;
    });
    GatewayOptions g = no_backoff();
    g.retries = 2;
    Gateway gw(std::make_shared<OpenAIBackend>(options_for(server.url())), g);
    GenRequest r;
    r.prompt = "x";
    CHECK_THROWS_AS(gw.generate(r), GatewayError);
    CHECK(calls == 3);
  }

  TEST_CASE("unreachable endpoint is a retryable transport error") {
    int port = 0;
    {
      httplib::Server probe;
      port = probe.bind_to_any_port("127.0.0.1");
    }
    auto o = options_for("http://127.0.0.1:" + std::to_string(port));
    o.timeout = std::chrono::seconds(1);
    OpenAIBackend backend(o);
    GenRequest r;
    r.prompt = "x";
    try {
      backend.complete(r);
      FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
      CHECK(e.retryable());
      CHECK(e.backend_id() == backend.id());
    }
  }

  TEST_CASE("request and response helpers") {
    OpenAIOptions o;
    o.model = "m";
    o.send_top_k = false;
    GenRequest r;
    r.prompt = "p";
    const auto body = build_chat_request(o, r);
    CHECK_FALSE(body.contains("top_k"));
    CHECK_FALSE(body.contains("seed"));
    CHECK_THROWS_AS(parse_chat_response("not json", "id"), GatewayError);
    CHECK_THROWS_AS(parse_chat_response("{}", "id"), GatewayError);
    CHECK(parse_chat_response(chat_body({"a", "b"}), "id") == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(OpenAIBackend(OpenAIOptions{"localhost:80", "m"}), ConfigError);
    CHECK_THROWS_AS(OpenAIBackend(OpenAIOptions{"http://localhost", ""}), ConfigError);
  }
}
