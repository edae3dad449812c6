#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace stlen {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Renders "p/q" with an explicit denominator, e.g. "0/1", "11/16".
std::string rat_str(const Rat& r);

// Fixed-point decimal approximation, e.g. "0.500000".
std::string rat_decimal(const Rat& r, int places = 6);

// Accepts "p/q" or a bare integer.
Rat rat_parse(const std::string& s);

// Least common multiple of the denominators; 1 for an empty vector.
BigInt denominator_lcm(const std::vector<Rat>& xs);

long long to_ll(const BigInt& v);

}  // namespace stlen
