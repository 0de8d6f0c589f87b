#include "hiter/moduli.hpp"

#include "hiter/util/exactexp.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <utility>

namespace hiter {

namespace {

Int parse_index(const std::string& s, const char* what) {
  Rat r = parse_rational(s);
  if (denominator(r) != 1 || r < 0) {
    throw std::invalid_argument(std::string(what) +
                                ": expected a nonnegative integer, got '" + s +
                                "'");
  }
  return numerator(r);
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* modulus_kind_name(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::rate_of_convergence:
      return "rate_of_convergence";
    case ModulusKind::cauchy_modulus:
      return "cauchy_modulus";
    case ModulusKind::product_rate:
      return "product_rate";
    case ModulusKind::limsup_rate:
      return "limsup_rate";
  }
  return "unknown";
}

Int EpsModulus::operator()(const Rat& eps) const {
  if (!fn) throw std::invalid_argument("EpsModulus: empty function");
  if (eps <= 0) throw std::invalid_argument("EpsModulus: eps must be positive");
  Int v = fn(eps);
  return v < 1 ? Int(1) : v;
}

Int DivergenceRate::operator()(const Int& n) const {
  if (!fn) throw std::invalid_argument("DivergenceRate: empty function");
  if (n < 1) throw std::invalid_argument("DivergenceRate: n must be >= 1");
  Int v = fn(n);
  return v < 1 ? Int(1) : v;
}

Int Counterexample::operator()(const Int& n) const {
  if (!fn) throw std::invalid_argument("Counterexample: empty function");
  if (n < 0) throw std::invalid_argument("Counterexample: n must be >= 0");
  Int v = fn(n);
  return v < 0 ? Int(0) : v;
}

Counterexample parse_counterexample(const std::string& descriptor) {
  const std::string d = trimmed(descriptor);
  Counterexample g;
  g.descriptor = d;
  if (d.rfind("g:const:", 0) == 0) {
    Int k = parse_index(d.substr(8), "g:const");
    g.fn = [k](const Int&) { return k; };
    return g;
  }
  if (d.rfind("g:affine:", 0) == 0) {
    const std::string rest = d.substr(9);
    auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("g:affine descriptor needs two parameters: " +
                                  d);
    }
    Int a = parse_index(rest.substr(0, colon), "g:affine");
    Int b = parse_index(rest.substr(colon + 1), "g:affine");
    g.fn = [a, b](const Int& n) { return a * n + b; };
    return g;
  }
  if (d.rfind("g:table:", 0) == 0) {
    const std::string rest = trimmed(d.substr(8));
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
      throw std::invalid_argument("g:table descriptor needs [v0,v1,...]: " + d);
    }
    auto values = std::make_shared<std::vector<Int>>();
    const std::string body = rest.substr(1, rest.size() - 2);
    if (!trimmed(body).empty()) {
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto comma = body.find(',', pos);
        std::string item = comma == std::string::npos
                               ? body.substr(pos)
                               : body.substr(pos, comma - pos);
        values->push_back(parse_index(trimmed(item), "g:table"));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    g.fn = [values](const Int& n) {
      if (n >= Int(values->size())) return Int(0);
      return (*values)[n.convert_to<std::size_t>()];
    };
    return g;
  }
  throw std::invalid_argument("unknown counterexample descriptor: " +
                              descriptor);
}

Rat ScalarSchedule::lambda_at(const Int& n) const {
  if (!lambda) throw std::invalid_argument("ScalarSchedule: empty lambda");
  if (n < 1) throw std::invalid_argument("ScalarSchedule: index must be >= 1");
  Rat v = lambda(n);
  if (v < 0 || v > 1) {
    throw std::domain_error("ScalarSchedule '" + name + "': lambda_" +
                            int_string(n) + " = " + rat_string(v) +
                            " outside [0,1]");
  }
  return v;
}

ScalarSchedule harmonic_schedule() {
  ScalarSchedule s;
  s.name = "harmonic";
  s.lambda = [](const Int& n) { return Rat(1, n + 1); };
  s.alpha.kind = ModulusKind::rate_of_convergence;
  s.alpha.fn = [](const Rat& eps) -> Int { return iceil(1 / eps) - 1; };
  s.beta.kind = ModulusKind::cauchy_modulus;
  s.beta.fn = [](const Rat& eps) -> Int {
    return eps >= Rat(1, 2) ? iceil(1 / eps) - 1 : iceil(1 / eps) - 2;
  };
  DivergenceRate theta;
  theta.fn = [](const Int& n) { return ceil_exp(n + 2); };
  theta.monotone = true;
  s.theta_div = theta;
  EpsModulus prod;
  prod.kind = ModulusKind::product_rate;
  prod.fn = [](const Rat& eps) -> Int { return iceil(2 / eps) - 2; };
  s.theta_prod = prod;
  // prod_{n=1}^{m} (1 - 1/(n+2)) = 2/(m+2), exactly.
  s.product_lower_bound = [](const Int& m) {
    if (m < 0) throw std::invalid_argument("product index must be >= 0");
    return Rat(2, m + 2);
  };
  return s;
}

ScalarSchedule sqrt_schedule() {
  ScalarSchedule s;
  s.name = "sqrt";
  // Least a with a^2 (n+1) >= 2^80, so lambda_n = a/2^40 lies in
  // [1/sqrt(n+1), 1/sqrt(n+1) + 2^-40).
  s.lambda = [](const Int& n) {
    Int a = isqrt_ceil(ceil_div(Int(1) << 80, n + 1));
    return Rat(a, Int(1) << 40);
  };
  s.alpha.kind = ModulusKind::rate_of_convergence;
  s.alpha.fn = [](const Rat& eps) { return iceil(1 / (eps * eps)); };
  // The schedule is nonincreasing, so s_n telescopes to lambda_1 -
  // lambda_{n+1} and alpha doubles as the Cauchy modulus.
  s.beta.kind = ModulusKind::cauchy_modulus;
  s.beta.fn = s.alpha.fn;
  DivergenceRate theta;
  theta.fn = [](const Int& n) { return iceil(Rat((n + 4) * (n + 4), 4)); };
  theta.monotone = true;
  s.theta_div = theta;
  return s;
}

ScalarSchedule make_schedule(const std::string& descriptor) {
  const std::string d = trimmed(descriptor);
  if (d == "harmonic") return harmonic_schedule();
  if (d == "sqrt") return sqrt_schedule();
  throw std::invalid_argument("unknown schedule descriptor: " + descriptor);
}

Int theta_plus(const DivergenceRate& theta, const Int& n,
               const Int& enum_budget) {
  if (n < 1) throw std::invalid_argument("theta_plus: n must be >= 1");
  if (theta.monotone) return theta(n);
  if (n > enum_budget) {
    throw std::length_error(
        "theta_plus: enumeration over a non-monotone rate up to " +
        int_string(n) + " exceeds the budget of " + int_string(enum_budget));
  }
  Int best = 0;
  for (Int i = 1; i <= n; ++i) best = std::max(best, theta(i));
  return best;
}

IterationResult iterate_functional(
    const std::function<Int(const Int&)>& f, const Int& count,
    const Int& start, const std::function<bool(const Int&, const Int&)>& keep_going) {
  if (!f) throw std::invalid_argument("iterate_functional: empty function");
  if (count < 0) throw std::invalid_argument("iterate_functional: count < 0");
  IterationResult r;
  r.value = start;
  r.steps_done = 0;
  r.trace.push_back(start);
  Int next_checkpoint = 1;
  bool last_recorded = true;
  while (r.steps_done < count) {
    r.value = f(r.value);
    ++r.steps_done;
    last_recorded = false;
    if (r.steps_done <= 8 || r.steps_done == next_checkpoint) {
      r.trace.push_back(r.value);
      last_recorded = true;
      while (next_checkpoint <= r.steps_done) next_checkpoint <<= 1;
    }
    if (keep_going && !keep_going(r.steps_done, r.value)) break;
  }
  if (!last_recorded) r.trace.push_back(r.value);
  r.completed = (r.steps_done == count);
  return r;
}

namespace {

ValidationResult inconclusive_beyond_horizon(const Rat& eps, const Int& m,
                                             const Int& horizon) {
  ValidationResult r;
  r.status = ValidationStatus::inconclusive;
  r.witness = ValidationWitness{eps, m, Rat(0)};
  r.detail = "modulus value " + int_string(m) + " exceeds horizon " +
             int_string(horizon);
  return r;
}

}  // namespace

ValidationResult validate_modulus(ModulusKind kind,
                                  const std::function<Rat(const Int&)>& seq,
                                  const Rat& limit, const EpsModulus& modulus,
                                  const std::vector<Rat>& eps_grid,
                                  const Int& horizon) {
  if (!seq) throw std::invalid_argument("validate_modulus: empty sequence");
  if (horizon < 1)
    throw std::invalid_argument("validate_modulus: horizon must be >= 1");
  const long long H = horizon.convert_to<long long>();
  ValidationResult r;
  for (const Rat& eps : eps_grid) {
    const Int m = modulus(eps);
    if (kind == ModulusKind::cauchy_modulus) {
      if (m >= horizon) return inconclusive_beyond_horizon(eps, m, horizon);
      const long long m0 = m.convert_to<long long>();
      const Rat base = seq(m);
      for (long long j = m0 + 1; j <= H; ++j) {
        Rat v = seq(Int(j));
        if (v - base > eps) {
          r.status = ValidationStatus::fail;
          r.witness = ValidationWitness{eps, Int(j), v};
          r.detail = "a_" + std::to_string(j) + " - a_" + std::to_string(m0) +
                     " = " + rat_string(v - base) + " > " + rat_string(eps);
          return r;
        }
      }
      continue;
    }
    if (m > horizon) return inconclusive_beyond_horizon(eps, m, horizon);
    const long long m0 = m.convert_to<long long>();
    for (long long n = m0; n <= H; ++n) {
      Rat v = seq(Int(n));
      bool ok = kind == ModulusKind::limsup_rate ? v <= eps
                                                 : abs(v - limit) <= eps;
      if (!ok) {
        r.status = ValidationStatus::fail;
        r.witness = ValidationWitness{eps, Int(n), v};
        r.detail = "index " + std::to_string(n) + " violates the " +
                   std::string(modulus_kind_name(kind)) + " property at eps = " +
                   rat_string(eps);
        return r;
      }
    }
  }
  r.status = ValidationStatus::pass;
  return r;
}

ValidationResult validate_divergence(const std::function<Rat(const Int&)>& seq,
                                     const DivergenceRate& theta,
                                     const std::vector<Int>& n_grid,
                                     const Int& horizon) {
  if (!seq) throw std::invalid_argument("validate_divergence: empty sequence");
  ValidationResult r;
  std::vector<std::pair<Int, Int>> targets;  // (theta(n), n), sorted by theta
  for (const Int& n : n_grid) {
    Int m = theta(n);
    if (m > horizon) return inconclusive_beyond_horizon(Rat(n), m, horizon);
    targets.emplace_back(m, n);
  }
  std::sort(targets.begin(), targets.end());
  // acc accumulates sum floor(a_k * 2^64) <= 2^64 * (exact partial sum), so
  // acc >= n * 2^64 certifies the true inequality.
  Int acc = 0;
  Int k = 0;
  for (const auto& [m, n] : targets) {
    while (k < m) {
      ++k;
      Rat v = seq(k);
      if (v < 0) {
        throw std::invalid_argument(
            "validate_divergence: series terms must be nonnegative");
      }
      acc += (numerator(v) << 64) / denominator(v);
    }
    if (acc < (n << 64)) {
      r.status = ValidationStatus::fail;
      r.witness = ValidationWitness{Rat(n), m, Rat(acc, Int(1) << 64)};
      r.detail = "partial-sum lower bound through index " + int_string(m) +
                 " fell short of " + int_string(n);
      return r;
    }
  }
  r.status = ValidationStatus::pass;
  return r;
}

}  // namespace hiter
