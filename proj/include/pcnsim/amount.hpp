#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "pcnsim/error.hpp"

namespace pcnsim {

// Fixed-point currency amount with six fractional digits, stored as an integer
// count of micro-units. All balance arithmetic is exact.
class Amount {
 public:
  static constexpr std::int64_t kScale = 1'000'000;
  static constexpr int kDigits = 6;

  constexpr Amount() = default;

  static constexpr Amount from_micros(std::int64_t micros) noexcept { return Amount(micros); }

  static constexpr Amount from_units(std::int64_t units) noexcept { return Amount(units * kScale); }

  // Rounds to the nearest micro-unit.
  static Amount from_double(double value) {
    const double scaled = std::nearbyint(value * static_cast<double>(kScale));
    if (!std::isfinite(scaled) || std::fabs(scaled) > 9.0e18)
      throw InvalidParameters("amount out of range: " + std::to_string(value));
    return Amount(static_cast<std::int64_t>(scaled));
  }

  // Accepts "[-]digits[.digits]" with at most six fractional digits.
  static Amount parse(std::string_view text) {
    if (text.empty()) throw InvalidParameters("empty amount");
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      pos = 1;
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool any_digit = false;
    bool in_frac = false;
    constexpr std::int64_t kWholeLimit = std::numeric_limits<std::int64_t>::max() / kScale - 1;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c == '.') {
        if (in_frac) throw InvalidParameters("malformed amount: " + std::string(text));
        in_frac = true;
        continue;
      }
      if (c < '0' || c > '9') throw InvalidParameters("malformed amount: " + std::string(text));
      any_digit = true;
      if (in_frac) {
        if (++frac_digits > kDigits)
          throw InvalidParameters("amount has more than 6 fractional digits: " + std::string(text));
        frac = frac * 10 + (c - '0');
      } else {
        whole = whole * 10 + (c - '0');
        if (whole > kWholeLimit) throw InvalidParameters("amount out of range: " + std::string(text));
      }
    }
    if (!any_digit) throw InvalidParameters("malformed amount: " + std::string(text));
    for (int i = frac_digits; i < kDigits; ++i) frac *= 10;
    const std::int64_t micros = whole * kScale + frac;
    return Amount(negative ? -micros : micros);
  }

  constexpr std::int64_t micros() const noexcept { return micros_; }

  double to_double() const noexcept { return static_cast<double>(micros_) / static_cast<double>(kScale); }

  // Always prints all six fractional digits so output is byte-stable.
  std::string to_string() const {
    const bool negative = micros_ < 0;
    const std::uint64_t magnitude =
        negative ? static_cast<std::uint64_t>(-(micros_ + 1)) + 1 : static_cast<std::uint64_t>(micros_);
    std::string frac = std::to_string(magnitude % kScale);
    frac.insert(0, static_cast<std::size_t>(kDigits) - frac.size(), '0');
    return (negative ? "-" : "") + std::to_string(magnitude / kScale) + "." + frac;
  }

  // Multiplies by a non-negative factor, truncating toward zero.
  Amount scaled(double factor) const {
    if (!(factor >= 0.0)) throw InvalidParameters("negative scale factor");
    if (factor == 1.0) return *this;
    return Amount(static_cast<std::int64_t>(std::trunc(static_cast<long double>(micros_) * factor)));
  }

  constexpr bool positive() const noexcept { return micros_ > 0; }
  constexpr bool is_zero() const noexcept { return micros_ == 0; }

  constexpr Amount& operator+=(Amount other) noexcept {
    micros_ += other.micros_;
    return *this;
  }
  constexpr Amount& operator-=(Amount other) noexcept {
    micros_ -= other.micros_;
    return *this;
  }
  friend constexpr Amount operator+(Amount lhs, Amount rhs) noexcept { return lhs += rhs; }
  friend constexpr Amount operator-(Amount lhs, Amount rhs) noexcept { return lhs -= rhs; }
  friend constexpr auto operator<=>(Amount, Amount) noexcept = default;
  friend constexpr bool operator==(Amount, Amount) noexcept = default;

  friend std::ostream& operator<<(std::ostream& os, Amount a) { return os << a.to_string(); }

 private:
  constexpr explicit Amount(std::int64_t micros) noexcept : micros_(micros) {}

  std::int64_t micros_ = 0;
};

constexpr Amount min(Amount a, Amount b) noexcept { return a < b ? a : b; }
constexpr Amount max(Amount a, Amount b) noexcept { return a < b ? b : a; }

}  // namespace pcnsim
