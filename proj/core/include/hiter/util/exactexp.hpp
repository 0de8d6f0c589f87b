#pragma once

#include "hiter/util/numeric.hpp"

namespace hiter {

// ⌈e^k⌉ computed exactly via certified dyadic interval bounds on e.
// The result has ~1.4427·k bits; throws std::overflow_error when that would
// exceed max_bits (towers feed enormous k here — callers budget for it).
Int ceil_exp(const Int& k, long max_bits = 1L << 26);

// Least integer k ≥ 0 with x ≤ e^k, decided exactly.
// Arguments below 1 clamp to 0 and emit a log_warning (per contract).
long ceil_ln(const Rat& x);

} // namespace hiter
