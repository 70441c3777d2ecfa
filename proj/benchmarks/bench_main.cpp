#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "absaug/balancer.hpp"
#include "absaug/evaluator.hpp"
#include "absaug/preference.hpp"
#include "absaug/rng.hpp"
#include "absaug/topic_model.hpp"

using namespace absaug;

namespace {

std::vector<std::string> corpus(std::size_t docs) {
  static const std::vector<std::string> words{
      "battery", "charge", "screen", "display", "pasta", "sauce", "waiter", "service",
      "price",   "value",  "keyboard", "keys", "fresh", "bright", "rude", "cheap"};
  Rng rng(1);
  std::vector<std::string> out;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string doc;
    const auto len = 6 + rng.uniform_index(10);
    for (std::size_t w = 0; w < len; ++w) doc += words[rng.uniform_index(words.size())] + " ";
    out.push_back(doc);
  }
  return out;
}

Dataset dataset(std::size_t pos, std::size_t neu, std::size_t neg) {
  Dataset d;
  std::size_t id = 0;
  for (auto [label, count] : {std::pair{Polarity::positive, pos}, {Polarity::neutral, neu},
                              {Polarity::negative, neg}}) {
    for (std::size_t i = 0; i < count; ++i, ++id) {
      d.instances.push_back({"review " + std::to_string(id) + " item", "item", label,
                             "b" + std::to_string(id), Origin::original});
    }
  }
  return d;
}

void BM_LdaFit(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)));
  LdaParams p;
  p.iterations = 50;
  for (auto _ : state) benchmark::DoNotOptimize(fit_lda(docs, p));
}
BENCHMARK(BM_LdaFit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LdaInfer(benchmark::State& state) {
  const auto docs = corpus(200);
  LdaParams p;
  p.iterations = 50;
  const auto model = fit_lda(docs, p);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(infer(model, docs[i++ % docs.size()]));
}
BENCHMARK(BM_LdaInfer)->Unit(benchmark::kMicrosecond);

void BM_BuildPair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  ScoredPool pool;
  for (std::size_t i = 0; i < n; ++i) {
    pool.push_back({"s", i, "cand-" + std::to_string(i), Prediction::positive, rng.uniform01() < 0.5,
                    rng.uniform01()});
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_pair(pool, "prompt"));
}
BENCHMARK(BM_BuildPair)->Arg(5)->Arg(64);

void BM_Balance(benchmark::State& state) {
  const auto d = dataset(2164, 637, 807);
  for (auto _ : state) benchmark::DoNotOptimize(balance(d, 42));
}
BENCHMARK(BM_Balance)->Unit(benchmark::kMicrosecond);

void BM_Evaluate(benchmark::State& state) {
  const auto d = dataset(600, 300, 300);
  Rng rng(4);
  std::vector<LabeledPrediction> preds;
  for (const auto& inst : d.instances) {
    preds.emplace_back(inst.source_id, static_cast<Prediction>(rng.uniform_index(4)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(d, preds));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
