#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace absaug {

enum class Polarity : std::uint8_t { positive = 0, neutral = 1, negative = 2 };

/// Canonical label order used for every report and table.
inline constexpr std::array<Polarity, 3> kPolarities{Polarity::positive, Polarity::neutral,
                                                     Polarity::negative};

constexpr std::size_t index_of(Polarity p) noexcept { return static_cast<std::size_t>(p); }

constexpr std::string_view to_string(Polarity p) noexcept {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::neutral: return "neutral";
    case Polarity::negative: return "negative";
  }
  return "neutral";
}

/// "Positive" / "Neutral" / "Negative", as the augmentation prompt spells them.
constexpr std::string_view capitalized(Polarity p) noexcept {
  switch (p) {
    case Polarity::positive: return "Positive";
    case Polarity::neutral: return "Neutral";
    case Polarity::negative: return "Negative";
  }
  return "Neutral";
}

/// Exact lowercase match only.
constexpr std::optional<Polarity> parse_polarity(std::string_view s) noexcept {
  for (Polarity p : kPolarities) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

/// Output of a sentiment predictor: one of the three polarities, or unparseable.
enum class Prediction : std::uint8_t { positive = 0, neutral = 1, negative = 2, unparseable = 3 };

constexpr Prediction to_prediction(Polarity p) noexcept { return static_cast<Prediction>(p); }

constexpr std::optional<Polarity> as_polarity(Prediction p) noexcept {
  if (p == Prediction::unparseable) return std::nullopt;
  return static_cast<Polarity>(p);
}

constexpr std::string_view to_string(Prediction p) noexcept {
  if (p == Prediction::unparseable) return "unparseable";
  return to_string(static_cast<Polarity>(p));
}

constexpr std::optional<Prediction> parse_prediction_label(std::string_view s) noexcept {
  if (s == "unparseable") return Prediction::unparseable;
  if (auto p = parse_polarity(s)) return to_prediction(*p);
  return std::nullopt;
}

}  // namespace absaug
