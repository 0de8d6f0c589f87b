#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace hiter {

// Exact integer / rational types used for every bound computation.
// Trajectory geometry is double precision; the two sides never mix silently.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// ⌈a/b⌉ for b > 0.
Int ceil_div(const Int& a, const Int& b);

Int iceil(const Rat& x);
Int ifloor(const Rat& x);

// Least a ≥ 0 with a·a ≥ n (n ≥ 0).
Int isqrt_ceil(const Int& n);

Int int_pow(Int base, unsigned long e);

// Accepts "3", "-7", "1/2", "-3/4", "0.25", "1e-3"-free plain decimals.
// Decimal strings convert exactly (0.1 -> 1/10). Throws std::invalid_argument.
Rat parse_rational(const std::string& s);

// Canonical text form: integer "n" or fraction "p/q" in lowest terms.
std::string rat_string(const Rat& x);
std::string int_string(const Int& x);

double rat_double(const Rat& x);

// Number of bits in |x| (0 for x = 0).
long bit_size(const Int& x);
long bit_size(const Rat& x); // numerator bits + denominator bits

// Least k ∈ Z with x ≤ 2^k, for x > 0.
long ceil_log2(const Rat& x);

} // namespace hiter
