#include "fixtures.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "absaug/augmenter.hpp"
#include "absaug/jsonl.hpp"
#include "absaug/llm_gateway.hpp"
#include "absaug/mock_backend.hpp"
#include "absaug/rng.hpp"

#ifndef ABSAUG_TEST_SOURCE_DIR
#error "ABSAUG_TEST_SOURCE_DIR must be defined"
#endif

namespace absaug::testing {
namespace {

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string without_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
  return s;
}

Polarity wrong_label(Polarity p) {
  return p == Polarity::positive ? Polarity::negative : Polarity::positive;
}

// The fixture answers in a few phrasings so parsing is exercised, not just matching.
std::string answer(Polarity p, std::size_t variant) {
  switch (variant % 3) {
    case 0: return std::string(to_string(p));
    case 1: return "Sentiment: " + std::string(capitalized(p));
    default: return "The sentiment is " + std::string(to_string(p)) + ".";
  }
}

enum class Shape { normal, chosen_empty, rejected_empty, identical, mixed };

Shape shape_of(std::size_t i) {
  switch (i % 4) {
    case 0: return Shape::normal;
    case 1: return Shape::chosen_empty;
    case 2: return Shape::rejected_empty;
    default: return i == 3 ? Shape::identical : Shape::mixed;
  }
}

// Gold-consistency of each candidate for a shape; the fifth slot of normal and
// chosen_empty pools is a rewrite that drops the aspect.
std::vector<bool> consistency(Shape s) {
  switch (s) {
    case Shape::normal: return {true, true, false, true, false};
    case Shape::chosen_empty: return {false, false, false, false, false};
    case Shape::rejected_empty:
    case Shape::identical: return {true, true, true, true, true};
    case Shape::mixed: return {false, true, false, true, true};
  }
  return {};
}

}  // namespace

Dataset fixture_dataset() {
  struct Row {
    const char* sentence;
    const char* aspect;
    Polarity label;
  };
  static const Row rows[] = {
      {"The battery life is excellent and lasts all day.", "battery life", Polarity::positive},
      {"I love the keyboard on this laptop.", "keyboard", Polarity::positive},
      {"The screen flickers constantly after an hour.", "screen", Polarity::negative},
      {"The pasta was fresh and perfectly seasoned.", "pasta", Polarity::positive},
      {"The waiter brought the menu after ten minutes.", "menu", Polarity::neutral},
      {"Customer support never answered my emails.", "Customer support", Polarity::negative},
      {"The trackpad is smooth and very responsive.", "trackpad", Polarity::positive},
      {"The fan gets loud whenever I open a browser.", "fan", Polarity::negative},
      {"Their sushi is the best in the neighborhood.", "sushi", Polarity::positive},
      {"The laptop ships with a charger and a sleeve.", "charger", Polarity::neutral},
      {"The dessert was stale and overpriced.", "dessert", Polarity::negative},
      {"Service was quick even on a busy Friday night.", "Service", Polarity::positive},
  };
  Dataset d;
  d.name = "fixture";
  std::size_t k = 0;
  for (const auto& r : rows) {
    d.instances.push_back({r.sentence, r.aspect, r.label, "fx-" + std::to_string(++k),
                           Origin::original});
  }
  return d;
}

std::vector<std::string> fixture_candidates(const Instance& inst, std::size_t i) {
  const std::string& s = inst.sentence;
  const std::string& a = inst.aspect;
  const std::string dropped = "Overall it was an experience worth mentioning to friends.";
  switch (shape_of(i)) {
    case Shape::identical:
      return std::vector<std::string>(5, "Honestly, " + lower_first(s));
    case Shape::rejected_empty:
      return {"In short, " + lower_first(s),
              "Enhanced sentence: " + s + " Friends keep asking about the " + a + ".",
              "After a week of use, " + lower_first(s),
              without_period(s) + ", which matters for the price and delivery.",
              s + " I would mention the " + a + " again."};
    case Shape::mixed:
      return {"In short, " + lower_first(s),
              s + " Everyone at the office agreed about the " + a + ".",
              "After a week of use, " + lower_first(s),
              without_period(s) + ", which matters for the price and delivery.",
              "Here is the enhanced sentence: " + s};
    case Shape::normal:
    case Shape::chosen_empty:
      return {"In short, " + lower_first(s),
              s + " Everyone at the office agreed about the " + a + ".",
              "After a week of use, " + lower_first(s),
              without_period(s) + ", which matters for the price and delivery.", dropped};
  }
  return {};
}

std::string fixture_mock_script(const Dataset& d) {
  std::string out;
  std::set<std::string> seen;
  auto emit = [&](const std::string& prompt, std::vector<std::string> completions) {
    if (!seen.insert(prompt).second) return;
    nlohmann::ordered_json j;
    j["prompt_hash"] = prompt_hash(prompt);
    j["completions"] = std::move(completions);
    append_jsonl(out, j);
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& inst = d.instances[i];
    const auto texts = fixture_candidates(inst, i);
    emit(build_prompt(inst), texts);
    const auto flags = consistency(shape_of(i));
    for (std::size_t c = 0; c < texts.size(); ++c) {
      const auto candidate = validate_candidate(inst, texts[c]);
      if (!candidate.valid) continue;
      const Polarity p = flags[c] ? inst.label : wrong_label(inst.label);
      emit(build_absa_prompt(candidate.text, inst.aspect), {answer(p, i + c)});
    }
  }
  return out;
}

Dataset synthetic_dataset(std::size_t positive, std::size_t neutral, std::size_t negative) {
  Dataset d;
  d.name = "synthetic";
  d.instances.reserve(positive + neutral + negative);
  std::size_t id = 0;
  for (auto [label, count] : {std::pair{Polarity::positive, positive}, {Polarity::neutral, neutral},
                              {Polarity::negative, negative}}) {
    for (std::size_t k = 0; k < count; ++k) {
      ++id;
      d.instances.push_back({"Synthetic review " + std::to_string(id) + " about the item.", "item",
                             label, "syn-" + std::to_string(id), Origin::original});
    }
  }
  return d;
}

std::vector<std::string> synthetic_corpus(std::size_t documents, std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> themes{
      {"battery", "charge", "hours", "power", "drain", "charger", "lasts"},
      {"screen", "display", "bright", "pixels", "resolution", "glare", "colors"},
      {"pasta", "sauce", "fresh", "flavor", "dish", "seasoned", "portion"},
      {"waiter", "service", "staff", "friendly", "rude", "attentive", "table"},
      {"price", "expensive", "cheap", "value", "cost", "money", "deal"},
      {"keyboard", "keys", "typing", "trackpad", "backlight", "layout", "click"},
  };
  Rng rng(seed);
  std::vector<std::string> docs;
  docs.reserve(documents);
  for (std::size_t d = 0; d < documents; ++d) {
    const auto main = rng.uniform_index(themes.size());
    const auto side = rng.uniform_index(themes.size());
    const auto len = 6 + rng.uniform_index(10);
    std::string doc = "The";
    for (std::size_t w = 0; w < len; ++w) {
      const auto& theme = rng.uniform01() < 0.8 ? themes[main] : themes[side];
      doc += " " + theme[rng.uniform_index(theme.size())];
    }
    docs.push_back(doc + ".");
  }
  return docs;
}

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "absaug-test-XXXXXX").string();
  if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path source_dir() { return ABSAUG_TEST_SOURCE_DIR; }

std::filesystem::path write_fixture_workspace(const std::filesystem::path& dir) {
  const auto d = fixture_dataset();
  write_file(dir / "fixture.jsonl", write_jsonl(d));
  write_file(dir / "mock_script.jsonl", fixture_mock_script(d));
  nlohmann::ordered_json backend{{"backend", "mock"},
                                 {"mock_script", "mock_script.jsonl"},
                                 {"backoff_ms", 0}};
  nlohmann::ordered_json cfg{{"input", "fixture.jsonl"},
                             {"output_dir", "out"},
                             {"seed", 42},
                             {"n_candidates", 5},
                             {"augmenter", backend},
                             {"reward_model", backend}};
  write_file(dir / "config.json", cfg.dump(2) + "\n");
  return dir / "config.json";
}

ScoredPool make_pool(const std::vector<bool>& consistent, const std::vector<double>& relevance,
                     std::string source_id) {
  ScoredPool pool;
  for (std::size_t i = 0; i < consistent.size(); ++i) {
    pool.push_back({source_id, i, "cand-" + std::to_string(i),
                    consistent[i] ? Prediction::positive : Prediction::negative, consistent[i],
                    relevance[i]});
  }
  return pool;
}

}  // namespace absaug::testing
