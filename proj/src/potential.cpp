#include "fgsym/potential.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

constexpr std::size_t kMaxDigits = 18;
constexpr long kMaxExponent = 100000;

[[noreturn]] void parse_error(std::string_view text, const char* why) {
  throw Error(ErrorCode::kParse, "invalid potential '" + std::string(text) + "': " + why);
}

}  // namespace

Potential::Potential(std::int64_t mantissa, std::int32_t exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  value_ = std::strtod(to_string().c_str(), nullptr);
}

Potential Potential::from_parts(std::int64_t mantissa, std::int32_t exponent) {
  if (mantissa <= 0) {
    throw Error(ErrorCode::kNonPositivePotential, "potential must be positive");
  }
  while (mantissa % 10 == 0) {
    mantissa /= 10;
    ++exponent;
  }
  return Potential(mantissa, exponent);
}

Potential Potential::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }

  std::string digits;  // significant digits, no leading zeros
  long exponent = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_point) parse_error(text, "second decimal point");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) break;
    any_digit = true;
    if (seen_point) --exponent;
    if (digits.empty() && c == '0') continue;
    digits.push_back(c);
  }
  if (!any_digit) parse_error(text, "no digits");

  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    long e = 0;
    bool exp_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exp_digit = true;
      e = e * 10 + (text[i] - '0');
      if (e > kMaxExponent) parse_error(text, "exponent out of range");
    }
    if (!exp_digit) parse_error(text, "empty exponent");
    exponent += exp_negative ? -e : e;
  }
  if (i != text.size()) parse_error(text, "trailing characters");

  while (!digits.empty() && digits.back() == '0') {
    digits.pop_back();
    ++exponent;
  }
  if (digits.empty() || negative) {
    throw Error(ErrorCode::kNonPositivePotential,
                "potential must be positive, got '" + std::string(text) + "'");
  }
  if (digits.size() > kMaxDigits) parse_error(text, "more than 18 significant digits");
  if (exponent > kMaxExponent || exponent < -kMaxExponent) parse_error(text, "exponent out of range");

  return Potential(std::stoll(digits), static_cast<std::int32_t>(exponent));
}

std::string Potential::to_string() const {
  const std::string digits = std::to_string(mantissa_);
  const long len = static_cast<long>(digits.size());
  const long e = exponent_;
  if (e >= 0 && len + e <= 21) {
    return digits + std::string(static_cast<std::size_t>(e), '0');
  }
  if (e < 0 && -e < len) {
    return digits.substr(0, static_cast<std::size_t>(len + e)) + "." +
           digits.substr(static_cast<std::size_t>(len + e));
  }
  if (e < 0 && -e - len <= 6) {
    return "0." + std::string(static_cast<std::size_t>(-e - len), '0') + digits;
  }
  std::string out = digits.substr(0, 1);
  if (len > 1) out += "." + digits.substr(1);
  return out + "e" + std::to_string(e + len - 1);
}

Potential quantize(const Potential& value, const Potential& epsilon) {
  const long double ratio = static_cast<long double>(value.mantissa()) /
                            static_cast<long double>(epsilon.mantissa()) *
                            std::pow(10.0L, static_cast<long double>(value.exponent() - epsilon.exponent()));
  const long double steps = std::round(ratio);
  if (steps < 1.0L) {
    throw Error(ErrorCode::kNonPositivePotential,
                "potential " + value.to_string() + " rounds to zero at tolerance " + epsilon.to_string());
  }
  const __int128 product = static_cast<__int128>(steps) * epsilon.mantissa();
  __int128 m = product;
  std::int32_t e = epsilon.exponent();
  while (m % 10 == 0) {
    m /= 10;
    ++e;
  }
  if (m > static_cast<__int128>(999'999'999'999'999'999LL)) {
    throw Error(ErrorCode::kParse, "quantized potential exceeds 18 significant digits");
  }
  return Potential::from_parts(static_cast<std::int64_t>(m), e);
}

Potential PotentialPolicy::intern(std::string_view text) const {
  return intern(Potential::parse(text));
}

Potential PotentialPolicy::intern(const Potential& value) const {
  return epsilon ? quantize(value, *epsilon) : value;
}

}  // namespace fgsym
