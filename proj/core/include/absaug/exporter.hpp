#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absaug/corpus.hpp"
#include "absaug/preference.hpp"

namespace absaug {

/// DPO export: {"prompt","chosen","rejected","source_id","branch"} per line.
std::string export_preferences(std::span<const PreferencePair> pairs);

/// Schema check for a DPO file. Returns one message per violation; empty means valid.
std::vector<std::string> validate_preferences_jsonl(std::string_view bytes);

/// SFT export: {"prompt": ABSA prompt, "completion": label word, "origin": origin} per instance.
std::string export_sft(const Dataset& d);

struct DatasetDigest {
  std::string file;  // base name only, so manifests do not depend on the working directory
  std::string sha256;
  std::size_t records = 0;
};

struct ManifestInput {
  /// Flattened run configuration (every default actually used).
  nlohmann::ordered_json config;
  std::map<std::string, std::optional<std::int64_t>> seeds;
  std::map<std::string, std::string> model_ids;
  std::map<std::string, DatasetDigest> datasets;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  /// ISO-8601; omitted from the document when empty.
  std::string timestamp;
};

nlohmann::ordered_json export_manifest(const ManifestInput& input);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace absaug
