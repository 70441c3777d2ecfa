#include "absaug/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "absaug/errors.hpp"
#include "absaug/jsonl.hpp"

namespace absaug {
namespace {

namespace pt = boost::property_tree;

unsigned char lower(unsigned char c) noexcept {
  return static_cast<unsigned char>(std::tolower(c));
}

std::size_t offset_of_line(std::string_view bytes, std::size_t line) {
  std::size_t offset = 0;
  for (std::size_t l = 1; l < line && offset < bytes.size(); ++offset) {
    if (bytes[offset] == '\n') ++l;
  }
  return offset;
}

struct XmlWalker {
  XmlParseResult& out;
  std::size_t sentence_ordinal = 0;

  void add_aspect(const std::string& sentence_id, const std::string& text,
                  const std::string& term, const std::string& polarity, std::size_t& kept) {
    if (polarity == "conflict") {
      ++out.skipped.conflict;
      return;
    }
    auto label = parse_polarity(polarity);
    if (!label) {
      throw DataError("unknown polarity '" + polarity + "' in sentence " + sentence_id);
    }
    Instance inst{text, term, *label, sentence_id + "#" + std::to_string(kept), Origin::original};
    try {
      validate_instance(inst);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (sentence " + sentence_id + ")");
    }
    out.dataset.instances.push_back(std::move(inst));
    ++kept;
  }

  void sentence(const pt::ptree& node) {
    ++sentence_ordinal;
    const std::string id =
        node.get<std::string>("<xmlattr>.id", "s" + std::to_string(sentence_ordinal));
    const std::string text{trim(node.get<std::string>("text", ""))};
    std::size_t kept = 0;

    if (auto terms = node.get_child_optional("aspectTerms")) {
      for (const auto& [name, term] : *terms) {
        if (name != "aspectTerm") continue;
        add_aspect(id, text, term.get<std::string>("<xmlattr>.term", ""),
                   term.get<std::string>("<xmlattr>.polarity", ""), kept);
      }
    }
    if (auto opinions = node.get_child_optional("Opinions")) {
      std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
      for (const auto& [name, op] : *opinions) {
        if (name != "Opinion") continue;
        const auto target = op.get<std::string>("<xmlattr>.target", "");
        const auto polarity = op.get<std::string>("<xmlattr>.polarity", "");
        if (target == "NULL") {
          ++out.skipped.null_target;
          continue;
        }
        // The same target is listed once per category; keep one copy.
        auto key = std::make_tuple(target, op.get<std::string>("<xmlattr>.from", ""),
                                   op.get<std::string>("<xmlattr>.to", ""), polarity);
        if (!seen.insert(std::move(key)).second) continue;
        add_aspect(id, text, target, polarity, kept);
      }
    }
  }

  void walk(const pt::ptree& node) {
    for (const auto& [name, child] : node) {
      if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
      if (name == "sentence") {
        sentence(child);
      } else {
        walk(child);
      }
    }
  }
};

}  // namespace

std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::original: return "original";
    case Origin::duplicate: return "duplicate";
    case Origin::augmented: return "augmented";
  }
  return "original";
}

std::optional<Origin> parse_origin(std::string_view s) noexcept {
  for (Origin o : {Origin::original, Origin::duplicate, Origin::augmented}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

std::size_t LabelCounts::max() const noexcept {
  return *std::max_element(counts.begin(), counts.end());
}

LabelCounts label_counts(const Dataset& d) {
  LabelCounts c;
  for (const auto& inst : d.instances) ++c[inst.label];
  return c;
}

std::string_view trim(std::string_view s) noexcept {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool contains_ci(std::string_view haystack, std::string_view needle) noexcept {
  if (needle.empty()) return true;
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return lower(static_cast<unsigned char>(a)) ==
                                 lower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

void validate_instance(const Instance& inst) {
  if (trim(inst.sentence).empty()) throw DataError("empty sentence");
  if (inst.origin == Origin::augmented) return;
  if (trim(inst.aspect).empty()) throw DataError("empty aspect");
  if (!contains_ci(inst.sentence, inst.aspect)) {
    throw DataError("aspect '" + inst.aspect + "' does not occur in sentence '" +
                    inst.sentence + "'");
  }
}

XmlParseResult parse_semeval_xml(std::string_view bytes, std::string name, Split split) {
  XmlParseResult result;
  result.dataset.name = std::move(name);
  result.dataset.split = split;

  pt::ptree tree;
  std::istringstream in{std::string(bytes)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    const std::size_t line = e.line();
    throw ParseError("malformed XML at line " + std::to_string(line) + ": " + e.message(),
                     line, offset_of_line(bytes, line));
  }
  XmlWalker{result}.walk(tree);
  return result;
}

Dataset parse_jsonl(std::string_view bytes, std::string name, Split split) {
  Dataset d;
  d.name = std::move(name);
  d.split = split;

  for_each_jsonl(bytes, [&](const nlohmann::json& obj, std::size_t line) {
    const auto where = " at line " + std::to_string(line);
    const auto field = [&](const char* key) -> std::string {
      auto it = obj.find(key);
      if (it == obj.end()) throw DataError(std::string("missing key '") + key + "'" + where);
      if (!it->is_string()) throw DataError(std::string("key '") + key + "' is not a string" + where);
      return it->get<std::string>();
    };

    Instance inst;
    inst.sentence = field("sentence");
    inst.aspect = field("aspect");
    const auto label = field("label");
    auto p = parse_polarity(label);
    if (!p) throw DataError("invalid label '" + label + "'" + where);
    inst.label = *p;

    if (obj.contains("origin")) {
      const auto o = field("origin");
      auto origin = parse_origin(o);
      if (!origin) throw DataError("invalid origin '" + o + "'" + where);
      inst.origin = *origin;
    }
    inst.source_id = obj.contains("source_id") ? field("source_id") : std::to_string(line);

    try {
      validate_instance(inst);
    } catch (const DataError& e) {
      throw DataError(e.what() + where);
    }
    d.instances.push_back(std::move(inst));
  });
  return d;
}

std::string write_jsonl(const Dataset& d) {
  std::string out;
  for (const auto& inst : d.instances) {
    nlohmann::ordered_json j;
    j["sentence"] = inst.sentence;
    j["aspect"] = inst.aspect;
    j["label"] = to_string(inst.label);
    j["origin"] = to_string(inst.origin);
    j["source_id"] = inst.source_id;
    append_jsonl(out, j);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path, Split split, SkipReport* skipped) {
  const std::string bytes = read_file(path);
  const std::string name = path.stem().string();
  const auto body = trim(bytes);
  if (!body.empty() && body.front() == '<') {
    auto parsed = parse_semeval_xml(bytes, name, split);
    if (skipped) *skipped = parsed.skipped;
    return std::move(parsed.dataset);
  }
  if (skipped) *skipped = {};
  return parse_jsonl(bytes, name, split);
}

void save_jsonl(const Dataset& d, const std::filesystem::path& path) {
  write_file(path, write_jsonl(d));
}

std::string format_stats(const LabelCounts& counts) {
  std::string out;
  for (Polarity p : kPolarities) {
    out += to_string(p);
    out += '\t';
    out += std::to_string(counts[p]);
    out += '\n';
  }
  out += "total\t" + std::to_string(counts.total()) + "\n";
  return out;
}

}  // namespace absaug
