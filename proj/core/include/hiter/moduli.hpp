#pragma once
// Modulus functions (rates of convergence/divergence, Cauchy moduli, effective
// limsup rates), counterexample functions g, canonical scalar schedules with
// their certified moduli, and exact evaluation helpers shared by the bound
// calculators.

#include "hiter/util/numeric.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hiter {

enum class ModulusKind {
  rate_of_convergence,
  cauchy_modulus,
  product_rate,
  limsup_rate,
};

const char* modulus_kind_name(ModulusKind kind);

// eps -> index from which the defining property of `kind` holds. Results are
// clamped to >= 1; enlarging a modulus of any supported kind keeps it valid.
struct EpsModulus {
  ModulusKind kind = ModulusKind::rate_of_convergence;
  std::function<Int(const Rat&)> fn;

  Int operator()(const Rat& eps) const;
};

// n -> index m with sum_{k=1}^{m} a_k >= n for the attached series.
// `monotone` enables the theta_plus shortcut. Results are clamped to >= 1;
// enlarging is valid for series with nonnegative terms.
struct DivergenceRate {
  std::function<Int(const Int&)> fn;
  bool monotone = false;

  Int operator()(const Int& n) const;
};

// The counterexample function g: N -> N from the metastability quantifier.
// 0-based argument; results are clamped to >= 0.
struct Counterexample {
  std::string descriptor;
  std::function<Int(const Int&)> fn;

  Int operator()(const Int& n) const;
};

// Descriptors: "g:const:K", "g:affine:A:B" (n -> A*n+B), "g:table:[v0,v1,...]"
// (0 beyond the table range).
Counterexample parse_counterexample(const std::string& descriptor);

// The scalar sequence (lambda_n)_{n>=1} in [0,1] together with its certified
// moduli: alpha (rate of convergence lambda_n -> 0), beta (Cauchy modulus of
// s_n = sum_{i=1}^n |lambda_{i+1}-lambda_i|), optionally theta_div (rate of
// divergence of sum lambda_{n+1}) and theta_prod (rate of convergence of
// prod (1-lambda_{n+1}) -> 0). product_lower_bound(m) returns a certified
// positive rational lower bound for prod_{n=1}^{m} (1-lambda_{n+1}); it serves
// both the D of the asymptotic-regularity rates and the D_k of the
// metastability tower (m = 0 means the empty product, bound 1).
struct ScalarSchedule {
  std::string name;
  std::function<Rat(const Int&)> lambda;
  EpsModulus alpha;
  EpsModulus beta;
  std::optional<DivergenceRate> theta_div;
  std::optional<EpsModulus> theta_prod;
  std::function<Rat(const Int&)> product_lower_bound;

  Rat lambda_at(const Int& n) const;  // checks n >= 1 and 0 <= lambda_n <= 1
};

// lambda_n = 1/(n+1) with alpha(e) = ceil(1/e)-1, beta(e) = ceil(1/e)-1 for
// e >= 1/2 and ceil(1/e)-2 otherwise, theta_prod(e) = ceil(2/e)-2,
// product_lower_bound(m) = 2/(m+2) (exact), theta_div(n) = ceil(e^{n+2}).
ScalarSchedule harmonic_schedule();

// lambda_n = dyadic upper approximation of 1/sqrt(n+1) within 2^-40,
// alpha(e) = beta(e) = ceil(1/e^2), theta_div(n) = ceil((n/2+2)^2).
ScalarSchedule sqrt_schedule();

// "harmonic" | "sqrt"
ScalarSchedule make_schedule(const std::string& descriptor);

// theta^+(n) = max{theta(i) | 1 <= i <= n}. Monotone rates are evaluated at n
// directly; otherwise the max is taken by enumeration, capped at enum_budget
// evaluations (length_error beyond).
Int theta_plus(const DivergenceRate& theta, const Int& n,
               const Int& enum_budget = Int(1) << 24);

struct IterationResult {
  Int value;       // final iterate, or the last one computed when cancelled
  Int steps_done;  // number of applications of f that executed
  bool completed;  // steps_done == count
  std::vector<Int> trace;  // iterates at steps 0, 1, 2, 4, 8, ... plus the last
};

// f applied `count` times to `start`, in exact integer arithmetic. After each
// application keep_going(steps_done, value) may cancel the run (budget hook);
// an empty callback never cancels.
IterationResult iterate_functional(
    const std::function<Int(const Int&)>& f, const Int& count, const Int& start,
    const std::function<bool(const Int&, const Int&)>& keep_going = {});

enum class ValidationStatus { pass, fail, inconclusive };

struct ValidationWitness {
  Rat eps;    // grid point (for divergence checks: the target n as a rational)
  Int index;  // violating / unreachable sequence index
  Rat value;  // sequence value at the witness index (0 when not applicable)
};

struct ValidationResult {
  ValidationStatus status = ValidationStatus::pass;
  std::optional<ValidationWitness> witness;
  std::string detail;
};

// Checks the defining property of `kind` for `modulus` against the exact
// sequence seq (1-based) on every eps in the grid, scanning indices up to
// `horizon`. rate_of_convergence / product_rate: |a_n - limit| <= eps for all
// n in [m, horizon]; cauchy_modulus: a_{m+n} - a_m <= eps for all m+n <=
// horizon; limsup_rate: a_n <= eps for all n in [m, horizon]. A modulus value
// beyond the horizon yields status inconclusive, never a silent pass.
ValidationResult validate_modulus(ModulusKind kind,
                                  const std::function<Rat(const Int&)>& seq,
                                  const Rat& limit, const EpsModulus& modulus,
                                  const std::vector<Rat>& eps_grid,
                                  const Int& horizon);

// Checks sum_{k=1}^{theta(n)} a_k >= n for every n in n_grid, using exact
// dyadic lower bounds on the partial sums (floor(a_k * 2^64) per term), so a
// pass certifies the true inequality. theta(n) > horizon -> inconclusive.
ValidationResult validate_divergence(const std::function<Rat(const Int&)>& seq,
                                     const DivergenceRate& theta,
                                     const std::vector<Int>& n_grid,
                                     const Int& horizon);

}  // namespace hiter
