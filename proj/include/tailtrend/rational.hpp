#ifndef TAILTREND_RATIONAL_HPP
#define TAILTREND_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailtrend {

// Exact rational for bandwidths and grid steps. Keeping h = num/den exact
// (instead of a rounded double) makes integer quantities like n*h, m = floor(1/h)
// and block boundaries computable without floating-point boundary surprises.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool positive() const { return num > 0; }

  // Accepts "p/q" or a plain decimal such as "0.05" (converted to 5/100).
  static Rational parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("rational: empty string");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const std::int64_t p = parse_int(text.substr(0, slash));
      const std::int64_t q = parse_int(text.substr(slash + 1));
      return Rational(p, q);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text), 1);
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("rational: too many decimal digits: " + text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool neg = !whole.empty() && whole[0] == '-';
    const std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    const std::int64_t mag = (w < 0 ? -w : w) * den + f;
    return Rational(neg ? -mag : mag, den);
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational: malformed number");
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("rational: malformed number: " + s);
    }
    if (pos != s.size()) throw std::invalid_argument("rational: malformed number: " + s);
    return v;
  }
};

}  // namespace tailtrend

#endif  // TAILTREND_RATIONAL_HPP
