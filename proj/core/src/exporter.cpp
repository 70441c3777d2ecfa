#include "absaug/exporter.hpp"

#include <chrono>
#include <ctime>
#include <set>

#include "absaug/jsonl.hpp"
#include "absaug/llm_gateway.hpp"

namespace absaug {

std::string export_preferences(std::span<const PreferencePair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["prompt"] = p.prompt;
    j["chosen"] = p.chosen;
    j["rejected"] = p.rejected;
    j["source_id"] = p.source_id;
    j["branch"] = to_string(p.branch);
    append_jsonl(out, j);
  }
  return out;
}

std::vector<std::string> validate_preferences_jsonl(std::string_view bytes) {
  static const std::set<std::string> kKeys{"prompt", "chosen", "rejected", "source_id", "branch"};
  std::vector<std::string> problems;
  if (!bytes.empty() && bytes.back() != '\n') problems.emplace_back("file does not end with LF");
  if (bytes.find('\r') != std::string_view::npos) problems.emplace_back("file contains CR bytes");
  try {
    for_each_jsonl(bytes, [&](const nlohmann::json& obj, std::size_t line) {
      const auto at = "line " + std::to_string(line) + ": ";
      for (const auto& [key, value] : obj.items()) {
        if (!kKeys.contains(key)) problems.push_back(at + "unexpected key '" + key + "'");
      }
      for (const auto& key : kKeys) {
        auto it = obj.find(key);
        if (it == obj.end()) {
          problems.push_back(at + "missing key '" + key + "'");
        } else if (!it->is_string()) {
          problems.push_back(at + "'" + key + "' is not a string");
        } else if (it->get_ref<const std::string&>().empty()) {
          problems.push_back(at + "'" + key + "' is empty");
        }
      }
      if (obj.contains("branch") && obj["branch"].is_string() &&
          !parse_branch(obj["branch"].get<std::string>())) {
        problems.push_back(at + "unknown branch '" + obj["branch"].get<std::string>() + "'");
      }
      if (obj.contains("chosen") && obj.contains("rejected") && obj["chosen"] == obj["rejected"]) {
        problems.push_back(at + "chosen equals rejected");
      }
    });
  } catch (const ParseError& e) {
    problems.emplace_back(e.what());
  }
  return problems;
}

std::string export_sft(const Dataset& d) {
  std::string out;
  for (const auto& inst : d.instances) {
    nlohmann::ordered_json j;
    j["prompt"] = build_absa_prompt(inst.sentence, inst.aspect);
    j["completion"] = to_string(inst.label);
    j["origin"] = to_string(inst.origin);
    append_jsonl(out, j);
  }
  return out;
}

nlohmann::ordered_json export_manifest(const ManifestInput& input) {
  nlohmann::ordered_json m;
  m["tool"] = "absaug";
  m["manifest_version"] = 1;
  if (!input.timestamp.empty()) m["created_at"] = input.timestamp;
  if (input.config.is_object()) {
    for (const auto& [key, value] : input.config.items()) m[key] = value;
  }
  auto& seeds = m["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [name, seed] : input.seeds) {
    seeds[name] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  }
  auto& models = m["models"] = nlohmann::ordered_json::object();
  for (const auto& [role, id] : input.model_ids) models[role] = id;
  auto& datasets = m["datasets"] = nlohmann::ordered_json::object();
  for (const auto& [role, digest] : input.datasets) {
    datasets[role] = {{"file", digest.file}, {"sha256", digest.sha256}, {"records", digest.records}};
  }
  m["counts"] = input.counts;
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace absaug
