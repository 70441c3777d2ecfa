#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace absaug {

/// The English stopword list compiled in from data/stopwords_en.txt.
const std::set<std::string, std::less<>>& builtin_stopwords();

/// Lowercases ASCII, splits on runs of non-alphanumeric bytes (bytes >= 0x80 count
/// as word characters so UTF-8 words survive), drops tokens shorter than two bytes
/// and stopwords.
class Tokenizer {
 public:
  Tokenizer();
  explicit Tokenizer(std::set<std::string, std::less<>> stopwords);

  /// One word per line; '#' starts a comment.
  static Tokenizer from_stopword_file(const std::filesystem::path& path);

  std::vector<std::string> tokenize(std::string_view text) const;

  const std::set<std::string, std::less<>>& stopwords() const noexcept { return stopwords_; }

  bool operator==(const Tokenizer&) const = default;

 private:
  std::set<std::string, std::less<>> stopwords_;
};

}  // namespace absaug
