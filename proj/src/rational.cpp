#include "matchlab/rational.hpp"

namespace matchlab {

std::string format_rational(const Rat& value) {
  std::string out = std::to_string(value.numerator());
  if (value.denominator() != 1) {
    out += "/";
    out += std::to_string(value.denominator());
  }
  return out;
}

Rat parse_rational(std::string_view text) {
  auto bad = [&] {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  };
  if (text.empty()) bad();
  std::size_t slash = text.find('/');
  auto parse_int = [&](std::string_view part) -> std::int64_t {
    if (part.empty()) bad();
    std::size_t pos = 0;
    bool neg = part[0] == '-';
    if (neg) pos = 1;
    if (pos == part.size()) bad();
    std::int64_t v = 0;
    for (; pos < part.size(); ++pos) {
      char c = part[pos];
      if (c < '0' || c > '9') bad();
      if (v > (INT64_MAX - (c - '0')) / 10) bad();
      v = v * 10 + (c - '0');
    }
    return neg ? -v : v;
  };
  std::int64_t num = parse_int(text.substr(0, slash));
  std::int64_t den = 1;
  if (slash != std::string_view::npos) {
    den = parse_int(text.substr(slash + 1));
    if (den <= 0) bad();
  }
  return Rat(num, den);
}

}  // namespace matchlab
