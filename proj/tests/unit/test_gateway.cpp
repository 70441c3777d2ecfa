#include <doctest.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "absaug/errors.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/mock_backend.hpp"
#include "absaug/rng.hpp"

using namespace absaug;

namespace {

GatewayOptions fast() {
  GatewayOptions o;
  o.backoff = std::chrono::milliseconds(0);
  return o;
}

/// Fails with a retryable error for the first `failures` calls, then echoes the prompt.
class FlakyBackend : public Backend {
 public:
  explicit FlakyBackend(std::size_t failures, bool retryable = true)
      : failures_(failures), retryable_(retryable) {}
  std::string id() const override { return "flaky"; }
  std::vector<std::string> complete(const GenRequest& r) override {
    if (calls++ < failures_) throw GatewayError("down", id(), 503, retryable_);
    return std::vector<std::string>(r.n_samples, r.prompt);
  }
  std::size_t calls = 0;

 private:
  std::size_t failures_;
  bool retryable_;
};

/// Thread-safe echo that records the peak number of concurrent calls.
class ConcurrentEcho : public Backend {
 public:
  std::string id() const override { return "echo"; }
  bool concurrent() const override { return true; }
  std::vector<std::string> complete(const GenRequest& r) override {
    const int now = ++active_;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    --active_;
    if (r.prompt == "boom") throw GatewayError("boom", id());
    return std::vector<std::string>(r.n_samples, "echo " + r.prompt);
  }
  std::atomic<int> peak{0};

 private:
  std::atomic<int> active_{0};
};

}  // namespace

TEST_SUITE("gateway") {
  TEST_CASE("mock echoes its script in order") {
    auto mock = std::make_shared<MockBackend>();
    mock->set_default({"A", "B", "C"});
    Gateway gw(mock, fast());
    GenRequest r;
    r.prompt = "anything";
    r.n_samples = 3;
    CHECK(gw.generate(r).completions == std::vector<std::string>{"A", "B", "C"});
    r.n_samples = 5;
    CHECK(gw.generate(r).completions == std::vector<std::string>{"A", "B", "C", "A", "B"});
    CHECK(gw.generate(r).backend_id == "mock");
  }

  TEST_CASE("mock script: prompt hash beats index beats default") {
    const auto script =
        "{\"prompt_hash\":\"" + prompt_hash("p1") + "\",\"completions\":[\"one\"]}\n" +
        "{\"index\":1,\"completions\":[\"second call\"]}\n" +
        "{\"prompt_hash\":\"" + prompt_hash("bad") + "\",\"error\":\"scripted failure\"}\n" +
        "{\"default\":[\"fallback\"]}\n";
    Gateway gw(std::make_shared<MockBackend>(MockBackend::from_jsonl(script)), fast());
    GenRequest r;
    r.prompt = "p1";
    CHECK(gw.generate(r).completions.front() == "one");  // call 0
    r.prompt = "other";
    CHECK(gw.generate(r).completions.front() == "second call");  // call 1
    CHECK(gw.generate(r).completions.front() == "fallback");     // call 2
    r.prompt = "bad";
    CHECK_THROWS_WITH_AS(gw.generate(r), doctest::Contains("scripted failure"), GatewayError);
  }

  TEST_CASE("mock without an entry or default fails") {
    Gateway gw(std::make_shared<MockBackend>(), fast());
    GenRequest r;
    r.prompt = "x";
    CHECK_THROWS_AS(gw.generate(r), GatewayError);
    CHECK_THROWS_AS(MockBackend::from_jsonl("{\"index\":0}\n"), DataError);
  }

  TEST_CASE("completions are trimmed; empty ones are topped up") {
    auto mock = std::make_shared<MockBackend>();
    mock->set_default({"  A \n", "", "C"});
    Gateway gw(mock, fast());
    GenRequest r;
    r.prompt = "x";
    r.n_samples = 3;
    CHECK(gw.generate(r).completions == std::vector<std::string>{"A", "C", "A"});
  }

  TEST_CASE("only-empty completions surface as an error after the retry budget") {
    auto mock = std::make_shared<MockBackend>();
    mock->set_default({"   "});
    Gateway gw(mock, fast());
    GenRequest r;
    r.prompt = "x";
    CHECK_THROWS_WITH_AS(gw.generate(r), doctest::Contains("empty completions"), GatewayError);
    CHECK(mock->calls() == 4);
  }

  TEST_CASE("retryable failures are retried up to the budget") {
    auto ok = std::make_shared<FlakyBackend>(3);
    Gateway gw(ok, fast());
    GenRequest r;
    r.prompt = "hi";
    CHECK(gw.generate(r).completions.front() == "hi");
    CHECK(ok->calls == 4);

    auto down = std::make_shared<FlakyBackend>(100);
    Gateway gw2(down, fast());
    try {
      gw2.generate(r);
      FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
      CHECK(e.backend_id() == "flaky");
      CHECK(std::string(e.what()).find("after 4 attempts") != std::string::npos);
    }
    CHECK(down->calls == 4);

    auto fatal = std::make_shared<FlakyBackend>(1, false);
    Gateway gw3(fatal, fast());
    CHECK_THROWS_AS(gw3.generate(r), GatewayError);
    CHECK(fatal->calls == 1);
  }

  TEST_CASE("request validation") {
    Gateway gw(std::make_shared<FlakyBackend>(0), fast());
    GenRequest r;
    r.n_samples = 0;
    CHECK_THROWS_AS(gw.generate(r), ConfigError);
    r.n_samples = 1;
    r.max_tokens = 0;
    CHECK_THROWS_AS(gw.generate(r), ConfigError);
    r.max_tokens = 1;
    r.temperature = -0.5;
    CHECK_THROWS_AS(gw.generate(r), ConfigError);
  }

  TEST_CASE("batched calls keep input order and bound concurrency") {
    auto echo = std::make_shared<ConcurrentEcho>();
    GatewayOptions o = fast();
    o.max_in_flight = 3;
    Gateway gw(echo, o);
    std::vector<GenRequest> reqs(40);
    for (std::size_t i = 0; i < reqs.size(); ++i) reqs[i].prompt = std::to_string(i);
    reqs[17].prompt = "boom";
    const auto out = gw.generate_all(reqs);
    REQUIRE(out.size() == reqs.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i == 17) {
        CHECK_FALSE(out[i].ok());
        CHECK_THROWS_AS(out[i].get(), GatewayError);
      } else {
        CHECK(out[i].get().completions.front() == "echo " + std::to_string(i));
      }
    }
    CHECK(echo->peak.load() <= 3);
    CHECK(echo->peak.load() >= 2);
  }

  TEST_CASE("prediction prompt template") {
    CHECK(build_absa_prompt("The \"best\" screen", "screen") ==
          "Predict the sentiment of the given aspect in the text.\n\n"
          "Text: \"The \\\"best\\\" screen\"\nAspect: \"screen\"\nSentiment:");
  }

  TEST_CASE("prediction parsing") {
    CHECK(parse_prediction("positive") == Prediction::positive);
    CHECK(parse_prediction("The sentiment is Negative.") == Prediction::negative);
    CHECK(parse_prediction("positive or negative") == Prediction::unparseable);
    CHECK(parse_prediction("NEUTRAL\nbut maybe positive") == Prediction::neutral);
    CHECK(parse_prediction("Positive, clearly positive!") == Prediction::positive);
    CHECK(parse_prediction("nonpositive") == Prediction::unparseable);
    CHECK(parse_prediction("") == Prediction::unparseable);
    CHECK(parse_prediction("\n\npositive") == Prediction::positive);
    CHECK(parse_prediction("Sentiment: Negative") == Prediction::negative);
  }

  TEST_CASE("property: parsing is total over arbitrary bytes") {
    Rng rng(77);
    const std::string alphabet = "positive neutral negative PN\n\t.,:;\"'\x01\xff\xc3\xa9";
    for (int trial = 0; trial < 5000; ++trial) {
      std::string s;
      const auto len = rng.uniform_index(40);
      for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
      const auto p = parse_prediction(s);
      CHECK((p == Prediction::positive || p == Prediction::neutral || p == Prediction::negative ||
             p == Prediction::unparseable));
    }
  }

  TEST_CASE("predict_sentiment sends the ABSA prompt at temperature 0") {
    class Capture : public Backend {
     public:
      std::string id() const override { return "capture"; }
      std::vector<std::string> complete(const GenRequest& r) override {
        last = r;
        return {"Neutral"};
      }
      GenRequest last;
    };
    auto cap = std::make_shared<Capture>();
    Gateway gw(cap, fast());
    CHECK(gw.predict_sentiment("The menu is long.", "menu") == Prediction::neutral);
    CHECK(cap->last.prompt == build_absa_prompt("The menu is long.", "menu"));
    CHECK(cap->last.temperature == 0.0);
    CHECK(cap->last.n_samples == 1);
    CHECK(cap->last.max_tokens == 16);
    CHECK_THROWS_AS(gw.predict_sentiment(" ", "menu"), DataError);
  }

  TEST_CASE("mock generation is a pure function of script and request") {
    auto a = std::make_shared<MockBackend>();
    a->add_for_prompt("p", {"x", "y"});
    Gateway gw(a, fast());
    GenRequest r;
    r.prompt = "p";
    r.n_samples = 4;
    const auto first = gw.generate(r).completions;
    for (int i = 0; i < 10; ++i) CHECK(gw.generate(r).completions == first);
  }
}
