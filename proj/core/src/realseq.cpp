#include "hiter/realseq.hpp"

#include "hiter/util/exactexp.hpp"

#include <algorithm>
#include <stdexcept>

namespace hiter {

namespace {

void require_eps_range(const Rat& eps, const Rat& hi, const char* who) {
  if (eps <= 0 || eps >= hi) {
    throw std::invalid_argument(std::string(who) + ": eps = " +
                                rat_string(eps) + " outside (0, " +
                                rat_string(hi) + ")");
  }
}

AoyamaBound finish_aoyama(AoyamaBound b, const Counterexample& g) {
  b.g_eps_L = b.L + g(b.L + b.psi_third);
  if (b.g_eps_L == 0) {
    throw std::invalid_argument(
        "aoyama bounds: window weight g_eps(L) = 0 (L = 0 and g(psi(eps/3)) = "
        "0) leaves Delta undefined");
  }
  b.Delta = b.eps / (3 * Rat(b.g_eps_L));
  b.g_descriptor = g.descriptor;
  return b;
}

}  // namespace

AoyamaBound aoyama_bounds_div(const Rat& eps, const Counterexample& g,
                              const Int& M, const DivergenceRate& theta,
                              const EpsModulus& psi) {
  require_eps_range(eps, Rat(2), "aoyama_bounds_div");
  if (M < 1) throw std::invalid_argument("aoyama_bounds_div: M must be >= 1");
  AoyamaBound b;
  b.eps = eps;
  b.M = M;
  b.psi_third = psi(eps / 3);
  b.Theta = theta(b.psi_third - 1 + ceil_ln(Rat(3 * M) / eps)) + 1;
  b.L = b.Theta - b.psi_third;
  if (b.L < 1) {
    throw std::domain_error(
        "aoyama_bounds_div: divergence rate fails theta(n) >= n (series with "
        "terms <= 1 always satisfy it)");
  }
  return finish_aoyama(std::move(b), g);
}

AoyamaBound aoyama_bounds_prod(const Rat& eps, const Counterexample& g,
                               const Int& M, const EpsModulus& theta,
                               const EpsModulus& psi, const Rat& D) {
  if (eps <= 0)
    throw std::invalid_argument("aoyama_bounds_prod: eps must be positive");
  if (M < 1) throw std::invalid_argument("aoyama_bounds_prod: M must be >= 1");
  if (D <= 0)
    throw std::invalid_argument("aoyama_bounds_prod: D must be positive");
  AoyamaBound b;
  b.eps = eps;
  b.M = M;
  b.D = D;
  b.psi_third = psi(eps / 3);
  b.Theta = std::max(theta(D * eps / (3 * M)) + 1, b.psi_third);
  b.L = b.Theta - b.psi_third;
  return finish_aoyama(std::move(b), g);
}

AoyamaBound aoyama_bounds_harmonic(const Rat& eps, const Counterexample& g,
                                   const Int& M, const EpsModulus& psi) {
  require_eps_range(eps, Rat(3), "aoyama_bounds_harmonic");
  if (M < 1)
    throw std::invalid_argument("aoyama_bounds_harmonic: M must be >= 1");
  AoyamaBound b;
  b.eps = eps;
  b.M = M;
  b.psi_third = psi(eps / 3);
  b.D = Rat(1, b.psi_third);
  b.Theta = iceil(Rat(3 * M * b.psi_third) / eps) + 1;
  b.L = b.Theta - b.psi_third;
  return finish_aoyama(std::move(b), g);
}

Int quant_liu_phi_div(const Rat& eps, const Int& M, const DivergenceRate& theta,
                      const EpsModulus& gamma) {
  require_eps_range(eps, Rat(2), "quant_liu_phi_div");
  if (M < 1) throw std::invalid_argument("quant_liu_phi_div: M must be >= 1");
  return theta(gamma(eps / 2) + 1 + ceil_ln(Rat(2 * M) / eps)) + 1;
}

Int quant_liu_phi_prod(const Rat& eps, const Int& M, const EpsModulus& theta,
                       const EpsModulus& gamma, const Rat& D) {
  require_eps_range(eps, Rat(2), "quant_liu_phi_prod");
  if (M < 1) throw std::invalid_argument("quant_liu_phi_prod: M must be >= 1");
  if (D <= 0)
    throw std::invalid_argument("quant_liu_phi_prod: D must be positive");
  (void)gamma(eps / 2);  // the product D certifies runs up to this index
  return theta(D * eps / (2 * M)) + 1;
}

Int lorentz_limsup_rate(const Rat& eps, const EpsModulus& P,
                        const EpsModulus& theta) {
  if (eps <= 0)
    throw std::invalid_argument("lorentz_limsup_rate: eps must be positive");
  Int p_tilde = P(eps / 2);
  return theta(eps / Rat(p_tilde + 1)) + p_tilde;
}

Int cesaro_vanish_P(const Rat& eps, const EpsModulus& phi, const Rat& L) {
  require_eps_range(eps, Rat(2), "cesaro_vanish_P");
  if (L <= 0)
    throw std::invalid_argument("cesaro_vanish_P: L must be positive");
  return iceil(2 * L * Rat(phi(eps / 2)) / eps);
}

Rat cesaro(const std::function<Rat(const Int&)>& a, const Int& n,
           const Int& p) {
  if (n < 1 || p < 1)
    throw std::invalid_argument("cesaro: n and p must be >= 1");
  Rat sum = 0;
  for (Int i = n; i < n + p; ++i) sum += a(i);
  return sum / Rat(p);
}

Rat cesaro(const std::vector<Rat>& a, const Int& n, const Int& p) {
  if (n < 1 || p < 1)
    throw std::invalid_argument("cesaro: n and p must be >= 1");
  if (n + p - 1 > Int(a.size()))
    throw std::invalid_argument("cesaro: sequence shorter than n+p-1");
  return cesaro(
      [&a](const Int& i) { return a[i.convert_to<std::size_t>() - 1]; }, n, p);
}

CesaroTable::CesaroTable(const std::vector<double>& values) {
  prefix_.resize(values.size() + 1);
  prefix_[0] = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    prefix_[i + 1] = prefix_[i] + static_cast<long double>(values[i]);
}

double CesaroTable::mean(long n, long p) const {
  if (n < 1 || p < 1) throw std::invalid_argument("cesaro: n and p must be >= 1");
  if (n + p - 1 > size())
    throw std::invalid_argument("cesaro: window exceeds table size");
  return static_cast<double>((prefix_[n + p - 1] - prefix_[n - 1]) /
                             static_cast<long double>(p));
}

WindowResult check_window(const RealSequenceWindow& w) {
  WindowResult out;
  if (w.N < 1 || w.gN < 0)
    throw std::invalid_argument("check_window: need N >= 1 and g(N) >= 0");
  Int H = Int(w.values.size());
  if (w.N + w.gN > H) {
    out.status = ValidationStatus::inconclusive;
    return out;
  }
  std::size_t lo = w.N.convert_to<std::size_t>();
  std::size_t hi = (w.N + w.gN).convert_to<std::size_t>();
  if (w.mode == WindowMode::sup) {
    std::size_t arg = lo;
    double maxv = w.values[lo - 1];
    for (std::size_t i = lo; i <= hi; ++i) {
      if (w.values[i - 1] > maxv) {
        maxv = w.values[i - 1];
        arg = i;
      }
    }
    out.observed = maxv;
    if (maxv > w.eps) {
      out.status = ValidationStatus::fail;
      out.witness = {Int(arg), Int(arg)};
    }
    return out;
  }
  std::size_t amin = lo, amax = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (w.values[i - 1] < w.values[amin - 1]) amin = i;
    if (w.values[i - 1] > w.values[amax - 1]) amax = i;
  }
  out.observed = w.values[amax - 1] - w.values[amin - 1];
  if (out.observed > w.eps) {
    out.status = ValidationStatus::fail;
    out.witness = {Int(amax), Int(amin)};
  }
  return out;
}

}  // namespace hiter
