#pragma once
// Quantitative real-sequence lemmas: perturbed-recurrence bounds (Θ, Δ),
// Cauchy-modulus variants, Cesàro averages, and window checkers.

#include "hiter/moduli.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hiter {

// The pair (Θ, Δ) with its audit trail: any sequence satisfying
//   s_{n+1} <= (1-α_n)s_n + α_n t_n + Δ,  s_n <= M,  t_n <= ε/3 for
//   n >= ψ(ε/3)
// obeys s_n <= ε on the whole window [Θ, Θ+g(Θ)].
struct AoyamaBound {
  Int Theta;
  Rat Delta;
  Rat eps;
  Int M;
  Int psi_third;          // ψ(ε/3)
  Int L;                  // Θ − ψ(ε/3)
  Int g_eps_L;            // g_ε(L) = L + g(L + ψ(ε/3))
  std::optional<Rat> D;   // finite-product lower bound (product form only)
  std::string g_descriptor;
};

// Divergence-rate form: Θ = θ(ψ(ε/3)−1+⌈ln(3M/ε)⌉)+1, Δ = ε/(3g_ε(Θ−ψ(ε/3))).
// Requires ε ∈ (0,2); θ must dominate the identity (rates of divergence of
// series with terms ≤ 1 always do).
AoyamaBound aoyama_bounds_div(const Rat& eps, const Counterexample& g,
                              const Int& M, const DivergenceRate& theta,
                              const EpsModulus& psi);

// Product-rate form: Θ = max{θ(Dε/3M)+1, ψ(ε/3)} with
// 0 < D ≤ Π_{n=1}^{ψ(ε/3)−1}(1−α_n). Θ−ψ(ε/3) may be 0; if additionally
// g(ψ(ε/3)) = 0 the window weight g_ε(L) vanishes and Δ is undefined —
// that degenerate combination raises std::invalid_argument.
AoyamaBound aoyama_bounds_prod(const Rat& eps, const Counterexample& g,
                               const Int& M, const EpsModulus& theta,
                               const EpsModulus& psi, const Rat& D);

// α_n = 1/(n+1) specialization: Θ = ⌈3Mψ(ε/3)/ε⌉+1, ε ∈ (0,3). Coincides
// with the product form at θ(ε) = ⌈1/ε⌉, D = 1/ψ(ε/3).
AoyamaBound aoyama_bounds_harmonic(const Rat& eps, const Counterexample& g,
                                   const Int& M, const EpsModulus& psi);

// For a_{n+1} ≤ (1−λ_{n+1})a_n + b_n with 0 ≤ a_n ≤ M and γ a Cauchy modulus
// of Σb_i: a_n ≤ ε for all n ≥ Φ.
//   divergence form:  Φ = θ(γ(ε/2)+1+⌈ln(2M/ε)⌉)+1, ε ∈ (0,2)
//   product form:     Φ = θ(Dε/2M)+1 with 0 < D ≤ Π_{n=1}^{γ(ε/2)}(1−λ_{n+1})
Int quant_liu_phi_div(const Rat& eps, const Int& M, const DivergenceRate& theta,
                      const EpsModulus& gamma);
Int quant_liu_phi_prod(const Rat& eps, const Int& M, const EpsModulus& theta,
                       const EpsModulus& gamma, const Rat& D);

// If C_{n,P(ε)}(a) ≤ a + ε for all n and θ rates limsup(a_{k+1}−a_k) ≤ 0,
// then a_n ≤ a + ε for n ≥ ψ(ε,P,θ) = θ(ε/(P̃+1)) + P̃ with P̃ = P(ε/2).
Int lorentz_limsup_rate(const Rat& eps, const EpsModulus& P,
                        const EpsModulus& theta);

// Nonnegative a_k → 0 with rate φ and bound L: C_{n,p}(a) ≤ ε for every
// p ≥ P(ε,φ,L) = ⌈2Lφ(ε/2)/ε⌉ and every n ≥ 1. ε ∈ (0,2).
Int cesaro_vanish_P(const Rat& eps, const EpsModulus& phi, const Rat& L);

// C_{n,p}(a) = (1/p) Σ_{i=n}^{n+p−1} a_i; sequences are 1-based.
Rat cesaro(const std::function<Rat(const Int&)>& a, const Int& n, const Int& p);
Rat cesaro(const std::vector<Rat>& a, const Int& n, const Int& p);

// O(1) Cesàro queries over a fixed double-valued window via prefix sums;
// values[i] holds a_{i+1}.
class CesaroTable {
 public:
  explicit CesaroTable(const std::vector<double>& values);
  // C_{n,p}; requires 1 <= n and n+p-1 <= size
  double mean(long n, long p) const;
  long size() const { return static_cast<long>(prefix_.size()) - 1; }

 private:
  std::vector<long double> prefix_;
};

enum class WindowMode {
  sup,         // every a_n <= eps on the window
  metastable,  // |a_n - a_m| <= eps for all window pairs
};

struct RealSequenceWindow {
  std::vector<double> values;  // values[i] = a_{i+1}; data for indices 1..H
  Int N;                       // window start
  Int gN;                      // window is [N, N+gN]
  double eps = 0;
  WindowMode mode = WindowMode::sup;
};

struct WindowResult {
  ValidationStatus status = ValidationStatus::pass;
  // violating index (sup mode: both equal) or extremal pair (metastable)
  std::optional<std::pair<Int, Int>> witness;
  double observed = 0;  // max value (sup) or max pairwise gap (metastable)
};

WindowResult check_window(const RealSequenceWindow& w);

}  // namespace hiter
