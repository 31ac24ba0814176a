#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace fgsym {

/// A positive potential value held as an exact decimal.
///
/// The value is `mantissa * 10^exponent` with the mantissa stripped of
/// trailing zeros, so two potentials compare equal exactly when their
/// canonical decimal forms are identical. This is the interned token used
/// throughout: equality never goes through floating point. A correctly
/// rounded double is kept alongside for products and printing.
class Potential {
 public:
  Potential() = default;

  /// Parses a decimal such as `3`, `0.25`, `1.5e-3`. Throws kParse on
  /// malformed text or more than 18 significant digits and
  /// kNonPositivePotential for zero or negative values.
  static Potential parse(std::string_view text);

  /// Builds `mantissa * 10^exponent`; mantissa must be positive.
  static Potential from_parts(std::int64_t mantissa, std::int32_t exponent);

  static Potential from_integer(std::int64_t value) { return from_parts(value, 0); }

  std::int64_t mantissa() const noexcept { return mantissa_; }
  std::int32_t exponent() const noexcept { return exponent_; }
  double value() const noexcept { return value_; }

  /// Canonical decimal text; `parse(p.to_string()) == p` for every p.
  std::string to_string() const;

  friend bool operator==(const Potential& a, const Potential& b) noexcept {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }

  // Numeric order, ties (which only occur if two distinct decimals round
  // to the same double) broken structurally so the order stays total.
  friend std::strong_ordering operator<=>(const Potential& a, const Potential& b) noexcept {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    if (auto c = a.exponent_ <=> b.exponent_; c != 0) return c;
    return a.mantissa_ <=> b.mantissa_;
  }

 private:
  Potential(std::int64_t mantissa, std::int32_t exponent);

  std::int64_t mantissa_ = 1;
  std::int32_t exponent_ = 0;
  double value_ = 1.0;
};

/// How decimals are turned into potentials. With an epsilon set, every
/// value is first rounded to the nearest positive multiple of epsilon.
struct PotentialPolicy {
  std::optional<Potential> epsilon;

  Potential intern(std::string_view text) const;
  Potential intern(const Potential& value) const;
};

/// Rounds `value` to the nearest multiple of `epsilon`; throws
/// kNonPositivePotential if that multiple is zero.
Potential quantize(const Potential& value, const Potential& epsilon);

}  // namespace fgsym

template <>
struct std::hash<fgsym::Potential> {
  std::size_t operator()(const fgsym::Potential& p) const noexcept {
    auto h = static_cast<std::uint64_t>(p.mantissa()) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.exponent())) + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};
