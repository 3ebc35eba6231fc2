#pragma once

// Fixed-precision helpers. Flux densities travel through I/O on a 0.0001 uT
// grid and display bands live on a 0.01 uT grid; both are kept as integer
// counts so rounding never depends on binary floating-point representation.

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include <fmt/format.h>

namespace emfrisk {

/// A quantity on the 0.01 uT grid.
struct Hundredths {
  std::int64_t count = 0;

  constexpr auto operator<=>(const Hundredths&) const = default;
  constexpr Hundredths operator-(std::int64_t steps) const { return {count - steps}; }
  constexpr Hundredths operator+(std::int64_t steps) const { return {count + steps}; }
  constexpr double value() const { return static_cast<double>(count) / 100.0; }
};

/// Nearest count of 0.0001 uT. Values are expected to be decimal-faithful to
/// four places, so this recovers the decimal the value was parsed from.
inline std::int64_t to_ten_thousandths(double value) {
  return static_cast<std::int64_t>(std::llround(value * 10000.0));
}

/// Half-up rounding to two decimals, applied to the four-decimal value.
inline Hundredths round_half_up_hundredths(double value) {
  const std::int64_t q = to_ten_thousandths(value);
  // floor((q + 50) / 100) for either sign
  const std::int64_t shifted = q + 50;
  std::int64_t c = shifted / 100;
  if (shifted % 100 != 0 && shifted < 0) --c;
  return {c};
}

/// `value >= limit` compared on the 0.0001 uT grid.
inline bool at_or_above(double value, double limit) {
  return to_ten_thousandths(value) >= to_ten_thousandths(limit);
}

/// Parses a plain decimal number (optional sign, digits, optional fraction,
/// optional exponent). `decimal_shift` moves the decimal point left by that
/// many places before conversion, so "0.5" with shift 1 is converted as the
/// exact decimal 0.05 rather than 0.5 / 10.
inline std::optional<double> parse_decimal(std::string_view text, int decimal_shift = 0) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++digits;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++digits;
  }
  if (digits == 0) return std::nullopt;

  long exponent = 0;
  const std::string_view mantissa = text.substr(0, i);
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    const std::string_view exp_text = text.substr(i + 1);
    std::string_view digits_only = exp_text;
    if (!digits_only.empty() && digits_only.front() == '+') digits_only.remove_prefix(1);
    if (digits_only.empty()) return std::nullopt;
    const auto [ptr, ec] =
        std::from_chars(digits_only.data(), digits_only.data() + digits_only.size(), exponent);
    if (ec != std::errc{} || ptr != digits_only.data() + digits_only.size()) return std::nullopt;
  }

  std::string normalized(mantissa);
  normalized += 'e';
  normalized += std::to_string(exponent - decimal_shift);
  if (normalized.front() == '+') normalized.erase(0, 1);

  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(normalized.data(), normalized.data() + normalized.size(), out);
  if (ec != std::errc{} || ptr != normalized.data() + normalized.size()) return std::nullopt;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

inline std::string format_fixed(double value, int places) {
  return fmt::format("{:.{}f}", value, places);
}

inline std::string format_uT(double value) { return format_fixed(value, 4); }

inline std::string format_hundredths(Hundredths h) {
  const std::int64_t magnitude = h.count < 0 ? -h.count : h.count;
  return fmt::format("{}{}.{:02d}", h.count < 0 ? "-" : "", magnitude / 100, magnitude % 100);
}

}  // namespace emfrisk
