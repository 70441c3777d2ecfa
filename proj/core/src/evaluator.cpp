#include "absaug/evaluator.hpp"

#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "absaug/errors.hpp"
#include "absaug/jsonl.hpp"

namespace absaug {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string join(const std::vector<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
  return s;
}

}  // namespace

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : cells) {
    for (auto c : row) n += c;
  }
  return n;
}

std::size_t ConfusionMatrix::correct() const noexcept {
  return cells[0][0] + cells[1][1] + cells[2][2];
}

EvalReport evaluate_confusion(const ConfusionMatrix& confusion) {
  EvalReport r;
  r.confusion = confusion;
  r.accuracy = ratio(confusion.correct(), confusion.total());
  double f1_sum = 0.0;
  for (std::size_t p = 0; p < 3; ++p) {
    std::size_t predicted = 0;  // column p; the unparseable column is never a label's column
    std::size_t gold = 0;       // row p, including unparseable predictions
    for (std::size_t g = 0; g < 3; ++g) predicted += confusion.cells[g][p];
    for (std::size_t c = 0; c < 4; ++c) gold += confusion.cells[p][c];
    const std::size_t tp = confusion.cells[p][p];
    r.precision[p] = ratio(tp, predicted);
    r.recall[p] = ratio(tp, gold);
    const double pr = r.precision[p] + r.recall[p];
    r.per_label_f1[p] = pr == 0.0 ? 0.0 : 2.0 * r.precision[p] * r.recall[p] / pr;
    f1_sum += r.per_label_f1[p];
  }
  r.macro_f1 = f1_sum / 3.0;
  return r;
}

EvalReport evaluate(const Dataset& gold, std::span<const LabeledPrediction> predictions) {
  std::map<std::string, Polarity> labels;
  for (const auto& inst : gold.instances) {
    if (!labels.emplace(inst.source_id, inst.label).second) {
      throw DataError("gold set repeats source_id '" + inst.source_id + "'");
    }
  }

  ConfusionMatrix confusion;
  std::set<std::string> seen;
  std::vector<std::string> extra;
  std::vector<std::string> repeated;
  for (const auto& [id, pred] : predictions) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      extra.push_back(id);
      continue;
    }
    if (!seen.insert(id).second) {
      repeated.push_back(id);
      continue;
    }
    confusion.add(it->second, pred);
  }
  std::vector<std::string> missing;
  for (const auto& [id, label] : labels) {
    if (!seen.contains(id)) missing.push_back(id);
  }
  if (!missing.empty() || !extra.empty() || !repeated.empty()) {
    std::string msg = "predictions do not cover the gold ids exactly";
    if (!missing.empty()) msg += "; missing: " + join(missing);
    if (!extra.empty()) msg += "; extra: " + join(extra);
    if (!repeated.empty()) msg += "; repeated: " + join(repeated);
    throw DataError(msg);
  }
  return evaluate_confusion(confusion);
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = confusion.total();
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  auto& labels = j["per_label"] = nlohmann::ordered_json::object();
  for (Polarity p : kPolarities) {
    const auto i = index_of(p);
    labels[std::string(to_string(p))] = {
        {"precision", precision[i]}, {"recall", recall[i]}, {"f1", per_label_f1[i]}};
  }
  auto& cm = j["confusion"] = nlohmann::ordered_json::object();
  for (Polarity g : kPolarities) {
    auto& row = cm[std::string(to_string(g))] = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < 4; ++c) {
      row[std::string(to_string(static_cast<Prediction>(c)))] = confusion.cells[index_of(g)][c];
    }
  }
  return j;
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(12) << "gold\\pred";
  for (std::size_t c = 0; c < 4; ++c) {
    os << std::right << std::setw(12) << to_string(static_cast<Prediction>(c));
  }
  os << '\n';
  for (Polarity g : kPolarities) {
    os << std::left << std::setw(12) << to_string(g);
    for (std::size_t c = 0; c < 4; ++c) os << std::right << std::setw(12) << confusion.cells[index_of(g)][c];
    os << '\n';
  }
  os << '\n';
  os << std::left << std::setw(12) << "label" << std::right << std::setw(12) << "precision"
     << std::setw(12) << "recall" << std::setw(12) << "f1" << '\n';
  for (Polarity p : kPolarities) {
    const auto i = index_of(p);
    os << std::left << std::setw(12) << to_string(p) << std::right << std::setw(12) << precision[i]
       << std::setw(12) << recall[i] << std::setw(12) << per_label_f1[i] << '\n';
  }
  os << '\n';
  os << std::left << std::setw(12) << "accuracy" << std::right << std::setw(12) << accuracy << '\n';
  os << std::left << std::setw(12) << "macro_f1" << std::right << std::setw(12) << macro_f1 << '\n';
  os << std::left << std::setw(12) << "total" << std::right << std::setw(12) << confusion.total()
     << '\n';
  return os.str();
}

PredictionRun predict_split(const Dataset& test, const Gateway& gateway) {
  std::vector<PredictRequest> requests;
  requests.reserve(test.size());
  for (const auto& inst : test.instances) requests.push_back({inst.sentence, inst.aspect});
  const auto outcomes = gateway.predict_all(requests);

  PredictionRun run;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& id = test.instances[i].source_id;
    try {
      run.predictions.emplace_back(id, outcomes[i].get());
    } catch (const std::exception& e) {
      run.failures.push_back({id, e.what()});
    }
  }
  return run;
}

std::string write_predictions_jsonl(std::span<const LabeledPrediction> predictions) {
  std::string out;
  for (const auto& [id, pred] : predictions) {
    nlohmann::ordered_json j;
    j["source_id"] = id;
    j["prediction"] = to_string(pred);
    append_jsonl(out, j);
  }
  return out;
}

std::vector<LabeledPrediction> read_predictions_jsonl(std::string_view bytes) {
  std::vector<LabeledPrediction> out;
  for_each_jsonl(bytes, [&](const nlohmann::json& obj, std::size_t line) {
    const auto where = " at line " + std::to_string(line);
    if (!obj.contains("source_id") || !obj["source_id"].is_string()) {
      throw DataError("missing key 'source_id'" + where);
    }
    if (!obj.contains("prediction") || !obj["prediction"].is_string()) {
      throw DataError("missing key 'prediction'" + where);
    }
    const auto label = obj["prediction"].get<std::string>();
    auto p = parse_prediction_label(label);
    if (!p) throw DataError("invalid prediction '" + label + "'" + where);
    out.emplace_back(obj["source_id"].get<std::string>(), *p);
  });
  return out;
}

}  // namespace absaug
