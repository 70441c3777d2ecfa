#include <doctest.h>

#include <cmath>

#include "absaug/errors.hpp"
#include "absaug/evaluator.hpp"
#include "absaug/mock_backend.hpp"
#include "absaug/rng.hpp"
#include "evaluator_scenarios.hpp"
#include "fixtures.hpp"

using namespace absaug;

namespace {

Dataset gold_of(const std::vector<Polarity>& labels) {
  Dataset d;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    d.instances.push_back({"Sentence " + std::to_string(i) + " about the item.", "item", labels[i],
                           "g" + std::to_string(i), Origin::original});
  }
  return d;
}

std::vector<LabeledPrediction> preds_of(const std::vector<Prediction>& p) {
  std::vector<LabeledPrediction> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back("g" + std::to_string(i), p[i]);
  return out;
}

constexpr auto P = Polarity::positive;
constexpr auto U = Polarity::neutral;
constexpr auto N = Polarity::negative;

}  // namespace

TEST_SUITE("evaluator") {
  TEST_CASE("metrics match the exact-arithmetic oracle on every scenario") {
    for (const auto& s : testing::kEvalScenarios) {
      CAPTURE(s.name);
      ConfusionMatrix m;
      m.cells = s.cells;
      const auto r = evaluate_confusion(m);
      CHECK(std::abs(r.accuracy - s.accuracy) <= 1e-12);
      CHECK(std::abs(r.macro_f1 - s.macro_f1) <= 1e-12);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(r.precision[i] - s.precision[i]) <= 1e-12);
        CHECK(std::abs(r.recall[i] - s.recall[i]) <= 1e-12);
        CHECK(std::abs(r.per_label_f1[i] - s.f1[i]) <= 1e-12);
      }
    }
  }

  TEST_CASE("hand-computed four-item example") {
    const auto gold = gold_of({P, P, N, U});
    const auto preds = preds_of({Prediction::positive, Prediction::negative, Prediction::negative,
                                 Prediction::neutral});
    const auto r = evaluate(gold, preds);
    CHECK(r.accuracy == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.per_label_f1[index_of(P)] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.per_label_f1[index_of(N)] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.per_label_f1[index_of(U)] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.macro_f1 == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("all correct, and one unparseable among four") {
    std::vector<Polarity> labels;
    std::vector<Prediction> preds;
    for (int i = 0; i < 10; ++i) {
      labels.push_back(kPolarities[i % 3]);
      preds.push_back(to_prediction(kPolarities[i % 3]));
    }
    const auto perfect = evaluate(gold_of(labels), preds_of(preds));
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.macro_f1 == 1.0);

    const auto r = evaluate(gold_of({P, U, N, P}), preds_of({Prediction::positive, Prediction::neutral,
                                                             Prediction::negative, Prediction::unparseable}));
    CHECK(r.accuracy == 0.75);
    CHECK(r.confusion.cells[index_of(P)][3] == 1);
  }

  TEST_CASE("id coverage errors list the offending ids") {
    const auto gold = gold_of({P, N});
    CHECK_THROWS_WITH_AS(evaluate(gold, preds_of({Prediction::positive})), doctest::Contains("missing: g1"),
                         DataError);
    auto extra = preds_of({Prediction::positive, Prediction::negative});
    extra.emplace_back("zz", Prediction::neutral);
    CHECK_THROWS_WITH_AS(evaluate(gold, extra), doctest::Contains("extra: zz"), DataError);
    auto twice = preds_of({Prediction::positive, Prediction::negative});
    twice.emplace_back("g0", Prediction::neutral);
    CHECK_THROWS_WITH_AS(evaluate(gold, twice), doctest::Contains("repeated: g0"), DataError);
    auto dup_gold = gold;
    dup_gold.instances[1].source_id = "g0";
    CHECK_THROWS_AS(evaluate(dup_gold, preds_of({Prediction::positive})), DataError);
  }

  TEST_CASE("property: accuracy is the brute-force match rate and order does not matter") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 1 + rng.uniform_index(30);
      std::vector<Polarity> labels;
      std::vector<Prediction> preds;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(kPolarities[rng.uniform_index(3)]);
        preds.push_back(static_cast<Prediction>(rng.uniform_index(4)));
        hits += preds.back() == to_prediction(labels.back()) ? 1 : 0;
      }
      const auto gold = gold_of(labels);
      auto p = preds_of(preds);
      const auto r = evaluate(gold, p);
      CHECK(r.accuracy == static_cast<double>(hits) / static_cast<double>(n));
      CHECK(r.macro_f1 >= 0.0);
      CHECK(r.macro_f1 <= 1.0);
      for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_index(i + 1)]);
      const auto shuffled = evaluate(gold, p);
      CHECK(shuffled.confusion == r.confusion);
      CHECK(shuffled.macro_f1 == r.macro_f1);
    }
  }

  TEST_CASE("predict_split keeps item order and records failures") {
    const auto test = gold_of({P, U, N});
    auto mock = std::make_shared<MockBackend>();
    mock->add_for_prompt(build_absa_prompt(test.instances[0].sentence, "item"), {"positive"});
    mock->add_error_for_prompt(build_absa_prompt(test.instances[1].sentence, "item"), "boom");
    mock->add_for_prompt(build_absa_prompt(test.instances[2].sentence, "item"), {"The sentiment is negative."});
    GatewayOptions o;
    o.backoff = std::chrono::milliseconds(0);
    const auto run = predict_split(test, Gateway(mock, o));
    REQUIRE(run.predictions.size() == 2);
    CHECK(run.predictions[0] == LabeledPrediction{"g0", Prediction::positive});
    CHECK(run.predictions[1] == LabeledPrediction{"g2", Prediction::negative});
    REQUIRE(run.failures.size() == 1);
    CHECK(run.failures[0].source_id == "g1");
    CHECK(run.failures[0].message.find("boom") != std::string::npos);

    auto neutral = std::make_shared<MockBackend>();
    neutral->set_default({"neutral"});
    for (const auto& [id, p] : predict_split(test, Gateway(neutral)).predictions) {
      CHECK(p == Prediction::neutral);
    }
  }

  TEST_CASE("prediction files round-trip") {
    const auto preds = preds_of({Prediction::positive, Prediction::unparseable, Prediction::neutral});
    CHECK(read_predictions_jsonl(write_predictions_jsonl(preds)) == preds);
    CHECK_THROWS_AS(read_predictions_jsonl(R"({"source_id":"a","prediction":"meh"})"), DataError);
    CHECK_THROWS_AS(read_predictions_jsonl(R"({"prediction":"positive"})"), DataError);
  }

  TEST_CASE("report renderings") {
    const auto r = evaluate(gold_of({P, N}), preds_of({Prediction::positive, Prediction::neutral}));
    const auto j = r.to_json();
    CHECK(j["total"] == 2);
    CHECK(j["accuracy"] == 0.5);
    CHECK(j["confusion"]["negative"]["neutral"] == 1);
    CHECK(j["per_label"]["positive"]["f1"] == 1.0);
    const auto table = r.to_table();
    CHECK(table.find("accuracy") != std::string::npos);
    CHECK(table.find("0.5000") != std::string::npos);
    CHECK(table.find("unparseable") != std::string::npos);
  }
}
