#pragma once
// Headline bound calculators, all in exact rational arithmetic: the
// asymptotic-regularity rates for the step and the fixed-point-residual
// sequences of a Halpern orbit, the metastability bounds Sigma built from the
// f/f*/f~* step-count tower, the resolvent-family metastability bound K, and
// the Cesaro/limsup rates for the gamma sequences. Every intermediate of the
// tower is exposed so independent evaluators can be checked bit for bit.

#include "hiter/moduli.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hiter {

struct RegularityRates {
  Int phi_tilde;           // d(x_n, x_{n+1}) <= eps for all n >= phi_tilde
  Int phi;                 // d(x_n, T x_n) <= eps for all n >= phi
  std::string provenance;  // "div" | "prod" | "harmonic"
  std::optional<Rat> D;    // certified product lower bound (prod route only)
};

// Route via a rate of divergence of sum lambda_{n+1} (schedule must carry
// theta_div). eps in (0,2).
RegularityRates asreg_rate_div(const Rat& eps, const Int& M,
                               const ScalarSchedule& schedule);

// Route via a rate of convergence of prod (1-lambda_{n+1}) -> 0 (schedule
// must carry theta_prod and product_lower_bound; D is taken at the index
// beta(eps/4M)). eps in (0,2).
RegularityRates asreg_rate_prod(const Rat& eps, const Int& M,
                                const ScalarSchedule& schedule);

// Closed forms for lambda_n = 1/(n+1): phi_tilde = ceil(2M/e + 8M^2/e^2) - 1,
// phi = ceil(4M/e + 16M^2/e^2) - 1. eps in (0,1).
RegularityRates asreg_rate_harmonic(const Rat& eps, const Int& M);

// The eps-indexed regularity pair consumed by the metastability towers
// (arguments stay in (0,2); M and the schedule moduli are bound in).
struct AsregPair {
  std::function<Int(const Rat&)> phi_tilde;
  std::function<Int(const Rat&)> phi;
};

AsregPair make_asreg_div(const Int& M, const ScalarSchedule& schedule);
AsregPair make_asreg_prod(const Int& M, const ScalarSchedule& schedule);
AsregPair make_asreg_harmonic(const Int& M);

// Budgets for the tower computation. The iterates of f~* can grow by orders
// of magnitude per step, so the computation stops (with an explicit partial
// status, never a silently wrong bound) once a budget is hit.
struct MetaBudget {
  Int max_steps = 10'000'000;  // f~* applications
  // Stop before an iterate exceeds this size. Exact rational rows normalize
  // through gcd, whose cost grows quadratically in the operand size, so the
  // wall time of a call grows roughly quadratically in this cap: ~40 ms at
  // 4096, seconds at 16384, minutes beyond 2^16. Raise it deliberately.
  long max_value_bits = 1 << 12;
  Int max_enum = Int(1) << 24;  // k-enumeration width for the final max
  long max_rows = 1 << 20;      // per-k rows kept (recording cap only)
};

enum class MetaStatus {
  complete,       // full iteration and full enumeration
  partial_steps,  // stopped by max_steps
  partial_bits,   // next iterate would exceed max_value_bits
  partial_enum,   // iteration finished but the final max was not enumerable
};

const char* meta_status_name(MetaStatus status);

// Intermediates at one tower index k.
struct MetaRow {
  Int k;
  Int P_tilde;  // P~_k at the chi* sub-argument eps^2/24
  Int chi;      // chi*_k(eps^2/12)
  Int Theta;    // Theta_k(eps^2/4)
  Rat Delta;    // Delta*_k(eps^2/4, g)
  Int f;        // f(k) = max{ceil(M^2/Delta), k} - k
};

// Result of a metastability bound computation. When status != complete,
// sigma is a certified lower bound for the true Sigma (the iteration and the
// enumeration are monotone, so truncating either only shrinks the max); it
// is never an approximation of unknown sign.
struct MetastabilityBound {
  MetaStatus status = MetaStatus::complete;
  bool sigma_is_exact = true;
  Int sigma;
  Rat eps;
  Rat eps0;           // eps^2 / (24 (M+1)^2)
  Int M;
  Int ceil_inv_eps0;  // ceil(1/eps0)
  Int J;              // ceil(M^2/eps0^2), the prescribed f~* iteration count
  Int steps_done;     // f~* applications actually performed
  Int K_end;          // last iterate reached (f~*^J(0) when complete)
  std::optional<Int> Gamma;  // div/prod route: argmax target of the final max
  std::optional<Int> L;      // harmonic route: K_end + ceil_inv_eps0
  std::vector<MetaRow> rows;
  long rows_recorded = 0;  // rows.size(); may be capped by max_rows
  Int enum_count;          // k values inspected for the final max
  std::string detail;
  std::string provenance;  // "div" | "prod" | "harmonic"
};

// Tower over a rate of divergence theta of sum lambda_{n+1} (theta(n) >= n is
// asserted at every evaluation; holds for any divergence rate of a series
// with terms <= 1). Sigma = theta^+(Gamma - 1 + ceil_ln(12 M^2/eps^2)) + 1
// with Gamma the max of chi*_k(eps^2/12) over k in
// [ceil(1/eps0), K_end + ceil(1/eps0)]. eps in (0,2). An `asreg` override
// replaces the default pair from asreg_rate_div.
MetastabilityBound meta_div(const Rat& eps, const Counterexample& g,
                            const Int& M, const ScalarSchedule& schedule,
                            const MetaBudget& budget = {},
                            const std::optional<AsregPair>& asreg = {});

// Tower over a rate theta_prod of prod (1-lambda_{n+1}) -> 0 with certified
// per-k product lower bounds D_k = product_lower_bound(chi*_k(eps^2/12) - 1).
// Sigma = max of Theta_k(eps^2/4) = theta_prod(D_k eps^2 / (12 M^2)) + 1 over
// the same k-range. Every recorded Theta_k must dominate chi*_k(eps^2/12)
// (domain_error otherwise). eps in (0,2).
MetastabilityBound meta_prod(const Rat& eps, const Counterexample& g,
                             const Int& M, const ScalarSchedule& schedule,
                             const MetaBudget& budget = {},
                             const std::optional<AsregPair>& asreg = {});

// Closed-form tower for lambda_n = 1/(n+1): chi*_k increases with k, so
// Sigma = ceil(12 M^2 (chi*_L(eps^2/12)+1)/eps^2) - 1 is evaluated at
// k = L = K_end + ceil(1/eps0) only. eps in (0,1).
MetastabilityBound meta_harmonic(const Rat& eps, const Counterexample& g,
                                 const Int& M, const MetaBudget& budget = {});

// Tower intermediates at a single index k >= 0, for cross-checking the
// routes against each other and against independent evaluators.
MetaRow meta_div_row(const Rat& eps, const Counterexample& g, const Int& M,
                     const ScalarSchedule& schedule, const Int& k,
                     const std::optional<AsregPair>& asreg = {});
MetaRow meta_prod_row(const Rat& eps, const Counterexample& g, const Int& M,
                      const ScalarSchedule& schedule, const Int& k,
                      const std::optional<AsregPair>& asreg = {});
MetaRow meta_harmonic_row(const Rat& eps, const Counterexample& g,
                          const Int& M, const Int& k);

// Resolvent-family metastability: K = g~^(ceil(M^2/eps^2))(0) with
// g~(k) = k + g(k). Some K0 <= K starts an eps-stable window of the
// resolvent family z_{1/(k+1)}.
Int browder_K(const Rat& eps, const Counterexample& g, const Int& M);

// General-parameter variant: K = chi^+(G^(ceil(4 M^2/eps^2))(0)) where
// G(k) = max{h(i) | i <= chi(k) + g(chi(k))} and chi^+ is the running max of
// chi. Enumerations are capped at enum_budget (length_error beyond).
Int browder_K_general(const Rat& eps, const Counterexample& g, const Int& M,
                      const std::function<Int(const Int&)>& chi,
                      const std::function<Int(const Int&)>& h,
                      const Int& enum_budget = Int(1) << 24);

// P = ceil((6 M^2/(t eps)) phi(t eps/(6M))): Cesaro averages C_{m,p} of the
// gamma_n^t sequence sit below eps for all p >= P, m >= 1. eps in (0,2),
// t in (0,1); phi a rate of asymptotic regularity of (y_n).
Int gamma_cesaro_P(const Rat& eps, const Rat& t, const Int& M,
                   const EpsModulus& phi);

// psi = phi_tilde(eps/(2M(P+1))) + P with P = gamma_cesaro_P(eps/2, t, M,
// phi): gamma_n^t <= eps for all n >= psi. phi_tilde is a rate of
// convergence of d(y_n, y_{n+1}) -> 0.
Int gamma_limsup_psi(const Rat& eps, const Rat& t, const Int& M,
                     const EpsModulus& phi, const EpsModulus& phi_tilde);

// (eps, M) -> (eps/M, 1): every bound can be run in rescaled form against
// the metric d/M. M >= 1.
std::pair<Rat, Int> rescale(const Rat& eps, const Int& M);

}  // namespace hiter
