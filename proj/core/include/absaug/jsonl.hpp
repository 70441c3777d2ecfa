#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "absaug/errors.hpp"

namespace absaug {

/// Calls fn(object, line) for every non-blank line; line numbers are 1-based.
/// Throws ParseError for malformed JSON or a line that is not an object.
template <class Fn>
void for_each_jsonl(std::string_view bytes, Fn&& fn) {
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view text = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("malformed JSON at line " + std::to_string(line) + ": " + e.what(), line,
                       e.byte);
    }
    if (!obj.is_object()) {
      throw ParseError("line " + std::to_string(line) + " is not a JSON object", line, 1);
    }
    fn(obj, line);
  }
}

/// Compact single-line dump plus '\n'. Invalid UTF-8 is replaced, never thrown on.
template <class Json>
void append_jsonl(std::string& out, const Json& j) {
  out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  out += '\n';
}

}  // namespace absaug
