#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/polarity.hpp"

namespace absaug {

enum class Origin : std::uint8_t { original, duplicate, augmented };
enum class Split : std::uint8_t { train, test };

std::string_view to_string(Origin o) noexcept;
std::optional<Origin> parse_origin(std::string_view s) noexcept;
std::string_view to_string(Split s) noexcept;

/// One labeled ABSA example: a sentence, an aspect term inside it, and the gold polarity.
struct Instance {
  std::string sentence;
  std::string aspect;
  Polarity label = Polarity::neutral;
  std::string source_id;
  Origin origin = Origin::original;

  bool operator==(const Instance&) const = default;
};

struct Dataset {
  Split split = Split::train;
  std::string name;
  std::vector<Instance> instances;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }

  bool operator==(const Dataset&) const = default;
};

/// Per-label counts indexed by Polarity.
struct LabelCounts {
  std::array<std::size_t, 3> counts{};

  std::size_t& operator[](Polarity p) noexcept { return counts[index_of(p)]; }
  std::size_t operator[](Polarity p) const noexcept { return counts[index_of(p)]; }
  std::size_t total() const noexcept { return counts[0] + counts[1] + counts[2]; }
  std::size_t max() const noexcept;

  bool operator==(const LabelCounts&) const = default;
};

LabelCounts label_counts(const Dataset& d);

/// Aspects dropped while reading SemEval XML.
struct SkipReport {
  std::size_t conflict = 0;     // polarity="conflict"
  std::size_t null_target = 0;  // 2015/16 opinions with target="NULL"

  std::size_t total() const noexcept { return conflict + null_target; }
};

struct XmlParseResult {
  Dataset dataset;
  SkipReport skipped;
};

/// Reads SemEval-2014 `<aspectTerm term=".." polarity=".."/>` files and the 2015/16
/// `<Opinion target=".." polarity=".."/>` variant. One instance per aspect, document order.
XmlParseResult parse_semeval_xml(std::string_view bytes, std::string name = {},
                                 Split split = Split::train);

/// Canonical JSONL: keys "sentence", "aspect", "label", optional "origin" and "source_id".
/// Instances without a "source_id" get their 1-based line number.
Dataset parse_jsonl(std::string_view bytes, std::string name = {}, Split split = Split::train);

std::string write_jsonl(const Dataset& d);

/// Reads either format, chosen by the first non-blank byte ('<' means XML).
Dataset load_dataset(const std::filesystem::path& path, Split split = Split::train,
                     SkipReport* skipped = nullptr);

void save_jsonl(const Dataset& d, const std::filesystem::path& path);

/// `label<TAB>count` per label in canonical order, then `total<TAB>N`.
std::string format_stats(const LabelCounts& counts);

/// ASCII case-insensitive substring test.
bool contains_ci(std::string_view haystack, std::string_view needle) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Throws DataError when an original/duplicate instance breaks the sentence/aspect rules.
void validate_instance(const Instance& instance);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace absaug
