#include "absaug/tokenizer.hpp"

#include <cctype>

#include "absaug/corpus.hpp"

namespace absaug {
namespace detail {
extern const std::string_view kBuiltinStopwords;
}  // namespace detail

namespace {

std::set<std::string, std::less<>> parse_stopwords(std::string_view text) {
  std::set<std::string, std::less<>> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    line = line.substr(0, line.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    std::string w(line);
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(w));
  }
  return words;
}

bool word_byte(unsigned char c) noexcept { return c >= 0x80 || std::isalnum(c) != 0; }

}  // namespace

const std::set<std::string, std::less<>>& builtin_stopwords() {
  static const auto words = parse_stopwords(detail::kBuiltinStopwords);
  return words;
}

Tokenizer::Tokenizer() : stopwords_(builtin_stopwords()) {}

Tokenizer::Tokenizer(std::set<std::string, std::less<>> stopwords)
    : stopwords_(std::move(stopwords)) {}

Tokenizer Tokenizer::from_stopword_file(const std::filesystem::path& path) {
  return Tokenizer(parse_stopwords(read_file(path)));
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::string token;
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    if (token.size() >= 2 && !stopwords_.contains(token)) tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace absaug
