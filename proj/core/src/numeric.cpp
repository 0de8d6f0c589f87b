#include "hiter/util/numeric.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <limits>
#include <stdexcept>

namespace hiter {

Int ceil_div(const Int& a, const Int& b) {
    if (b <= 0) throw std::invalid_argument("ceil_div: divisor must be positive");
    Int q = a / b, r = a % b;
    if (r > 0) ++q;
    return q;
}

Int iceil(const Rat& x) {
    return ceil_div(numerator(x), denominator(x));
}

Int ifloor(const Rat& x) {
    Int n = numerator(x), d = denominator(x);
    Int q = n / d, r = n % d;
    if (r < 0) --q;
    return q;
}

Int isqrt_ceil(const Int& n) {
    if (n < 0) throw std::invalid_argument("isqrt_ceil: negative argument");
    if (n == 0) return 0;
    Int r = sqrt(n); // floor sqrt
    return (r * r >= n) ? r : r + 1;
}

Int int_pow(Int base, unsigned long e) {
    Int acc = 1;
    while (e) {
        if (e & 1) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

namespace {

// [+-]?digits -> Int; rejects anything else. Strips leading zeros so the
// cpp_int constructor never sees an octal-looking literal.
Int parse_int_str(const std::string& s, const std::string& whole) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    if (t.empty()) throw std::invalid_argument("parse_rational: malformed number '" + whole + "'");
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("parse_rational: malformed number '" + whole + "'");
    auto nz = t.find_first_not_of('0');
    t = (nz == std::string::npos) ? "0" : t.substr(nz);
    Int v(t);
    return neg ? -v : v;
}

} // namespace

Rat parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw std::invalid_argument("parse_rational: empty string");

    auto slash = t.find('/');
    if (slash != std::string::npos) {
        Int n = parse_int_str(t.substr(0, slash), s);
        Int d = parse_int_str(t.substr(slash + 1), s);
        if (d == 0) throw std::invalid_argument("parse_rational: zero denominator");
        return Rat(n, d);
    }
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        std::string ipart = t.substr(0, dot), fpart = t.substr(dot + 1);
        bool neg = !ipart.empty() && ipart[0] == '-';
        if (neg) ipart = ipart.substr(1);
        if (!ipart.empty() && ipart[0] == '+') ipart = ipart.substr(1);
        if (ipart.empty()) ipart = "0";
        if (fpart.empty()) fpart = "0";
        Int n = parse_int_str(ipart + fpart, s);
        Int d = int_pow(Int(10), fpart.size());
        Rat r(n, d);
        return neg ? -r : r;
    }
    return Rat(parse_int_str(t, s));
}

std::string rat_string(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

std::string int_string(const Int& x) { return x.str(); }

double rat_double(const Rat& x) { return x.convert_to<double>(); }

long bit_size(const Int& x) {
    if (x == 0) return 0;
    return static_cast<long>(msb(abs(x))) + 1;
}

long bit_size(const Rat& x) {
    return bit_size(numerator(x)) + bit_size(denominator(x));
}

long ceil_log2(const Rat& x) {
    if (x <= 0) throw std::invalid_argument("ceil_log2: argument must be positive");
    Int n = numerator(x), d = denominator(x);
    long k = bit_size(n) - bit_size(d); // 2^(k-1) ≤ x < 2^(k+1)
    // adjust so that 2^(k-1) < x ≤ 2^k
    auto le_pow2 = [&](long e) { // x ≤ 2^e ?
        if (e >= 0) return n <= d << static_cast<unsigned>(e);
        return n << static_cast<unsigned>(-e) <= d;
    };
    while (!le_pow2(k)) ++k;
    while (k > std::numeric_limits<long>::min() && le_pow2(k - 1)) --k;
    return k;
}

} // namespace hiter
