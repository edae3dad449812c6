#include "stlen/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <sstream>

namespace stlen {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << numerator(r) << "/" << denominator(r);
  return os.str();
}

std::string rat_decimal(const Rat& r, int places) {
  BigInt num = numerator(r);
  BigInt den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  // round half away from zero
  BigInt scaled = (num * scale * 2 + den) / (den * 2);
  BigInt whole = scaled / scale;
  BigInt frac = scaled % scale;
  std::ostringstream os;
  if (neg) os << '-';
  os << whole << '.';
  std::string f = frac.str();
  os << std::string(places - static_cast<int>(f.size()), '0') << f;
  return os.str();
}

Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational literal: '" + s + "'");
  }
}

BigInt denominator_lcm(const std::vector<Rat>& xs) {
  BigInt l = 1;
  for (const auto& x : xs) {
    BigInt d = denominator(x);
    l = l / gcd(l, d) * d;
  }
  return l;
}

long long to_ll(const BigInt& v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw std::overflow_error("value out of long long range");
  return v.convert_to<long long>();
}

}  // namespace stlen
