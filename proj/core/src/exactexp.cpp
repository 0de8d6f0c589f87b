#include "hiter/util/exactexp.hpp"

#include "hiter/util/log.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace hiter {

namespace {

// L/2^p ≤ e ≤ H/2^p, gap a few ulp.
struct Dyadic {
    Int lo, hi;
    long p;
};

// The bound calculators evaluate ⌈ln·⌉ millions of times at a handful of
// precisions, so the series for e is cached per precision.
Dyadic e_bounds(long p) {
    thread_local std::map<long, Dyadic> cache;
    if (auto it = cache.find(p); it != cache.end()) return it->second;
    Dyadic result = [p] {
        long q = p + 16;
        Int tlo = Int(1) << q, thi = tlo; // j = 0 term
        Int lo = tlo, hi = thi;
        long j = 1;
        while (true) {
            tlo /= j;              // stays ≤ 2^q/j!
            thi = thi / j + 1;     // stays ≥ 2^q/j!, excess ≤ 2
            lo += tlo;
            hi += thi;
            if (thi <= 2) {        // tail Σ_{i>j} 1/i! < 2/(j+1)! ≤ 4/2^q
                hi += 4;
                break;
            }
            ++j;
        }
        return Dyadic{lo >> 16, (hi >> 16) + 1, p};
    }();
    cache.emplace(p, result);
    return result;
}

// lo/2^p ≤ e^k ≤ hi/2^p via square-and-multiply with directed rounding.
Dyadic exp_bounds(unsigned long k, long p) {
    Dyadic e = e_bounds(p);
    Int lo = Int(1) << p, hi = lo;
    Int blo = e.lo, bhi = e.hi;
    auto mul_lo = [p](const Int& a, const Int& b) { return (a * b) >> p; };
    auto mul_hi = [p](const Int& a, const Int& b) { return ((a * b) >> p) + 1; };
    while (k) {
        if (k & 1) {
            lo = mul_lo(lo, blo);
            hi = mul_hi(hi, bhi);
        }
        k >>= 1;
        if (k) {
            blo = mul_lo(blo, blo);
            bhi = mul_hi(bhi, bhi);
        }
    }
    return {lo, hi, p};
}

} // namespace

Int ceil_exp(const Int& k, long max_bits) {
    if (k < 0) throw std::invalid_argument("ceil_exp: negative exponent");
    if (k == 0) return 1;
    // result needs ~k·log2(e) bits
    if (Rat(k) * Rat(14427, 10000) > max_bits)
        throw std::overflow_error("ceil_exp: e^" + k.str() + " exceeds bit budget (" +
                                  std::to_string(max_bits) + " bits)");
    auto ku = k.convert_to<unsigned long>();
    long p = static_cast<long>(1.4427 * static_cast<double>(ku)) + 96;
    for (;;) {
        Dyadic b = exp_bounds(ku, p);
        Int fl = b.lo >> p, fh = b.hi >> p;
        if (fl == fh) return fl + 1; // e^k is irrational for k ≥ 1
        p *= 2;
    }
}

namespace {

// exact trichotomy-free test: x ≤ e^k, refining until the interval decides
bool le_exp(const Rat& x, long k, long max_bits) {
    if (k <= 0) return x <= 1;
    long p = static_cast<long>(1.4427 * static_cast<double>(k)) + 96;
    const Int n = numerator(x), d = denominator(x);
    for (;;) {
        Dyadic b = exp_bounds(static_cast<unsigned long>(k), p);
        if (n << static_cast<unsigned>(p) <= b.lo * d) return true;
        if (n << static_cast<unsigned>(p) > b.hi * d) return false;
        p *= 2;
        if (p > max_bits) throw std::overflow_error("ceil_ln: comparison precision blowup");
    }
}

} // namespace

long ceil_ln(const Rat& x) {
    if (x <= 0) throw std::domain_error("ceil_ln: argument must be positive");
    if (x < 1) {
        log_warning("ceil_ln: argument " + rat_string(x) + " < 1 clamped to 0");
        return 0;
    }
    if (x == 1) return 0;
    constexpr long kMaxBits = 1L << 26;
    long l2 = ceil_log2(x);
    long k = static_cast<long>(std::ceil(static_cast<double>(l2) * 0.6931471805599453)) + 1;
    if (k < 1) k = 1;
    while (k > 1 && le_exp(x, k - 1, kMaxBits)) --k;
    while (!le_exp(x, k, kMaxBits)) ++k;
    return k;
}

} // namespace hiter
