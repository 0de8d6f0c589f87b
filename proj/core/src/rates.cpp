#include "hiter/rates.hpp"

#include "hiter/util/exactexp.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace hiter {

namespace {

void check_eps_lt(const Rat& eps, int hi, const char* who) {
  if (eps <= 0 || eps >= hi)
    throw std::invalid_argument(std::string(who) + ": eps must lie in (0," +
                                std::to_string(hi) + "), got " +
                                rat_string(eps));
}

void check_M(const Int& M, const char* who) {
  if (M < 1)
    throw std::invalid_argument(std::string(who) + ": M must be >= 1, got " +
                                int_string(M));
}

// Route-specific ingredients of the tower, all bound to the fixed arguments
// eps^2/24 (P~), eps^2/12 (chi*), eps^2/4 (Theta, Delta).
struct TowerSetup {
  Int M;
  Rat e24;
  Rat e12;
  Rat eps_p;
  std::function<std::pair<Int, Int>(const Int&)> chi_with_ptilde;
  std::function<Int(const Int&, const Int&)> theta_k;  // (k, chi) -> Theta_k
};

TowerSetup generic_setup(const Rat& eps, const Int& M, const AsregPair& pair,
                         const char* who) {
  if (!pair.phi_tilde || !pair.phi)
    throw std::invalid_argument(std::string(who) +
                                ": regularity pair has an empty function");
  TowerSetup s;
  s.M = M;
  s.e24 = eps * eps / 24;
  s.e12 = eps * eps / 12;
  s.eps_p = eps * eps / 4;
  const Rat e24 = s.e24;
  const Rat e12 = s.e12;
  s.chi_with_ptilde = [pair, M, e24,
                       e12](const Int& k) -> std::pair<Int, Int> {
    const Int kp1 = k + 1;
    const Int c_phi = 12 * M * kp1;
    const Int c_lead = 12 * M * M * kp1;
    const Rat earg = e24 / Rat(c_phi);
    const Int phi_v = pair.phi(earg);
    const Int pt = iceil(Rat(c_lead) / e24 * Rat(phi_v));
    const Int p1 = pt + 1;
    const Int c_tilde = 4 * M * p1;
    const Int chi = pair.phi_tilde(e12 / Rat(c_tilde)) + pt;
    return {pt, chi};
  };
  return s;
}

TowerSetup harmonic_setup(const Rat& eps, const Int& M) {
  TowerSetup s;
  s.M = M;
  s.e24 = eps * eps / 24;
  s.e12 = eps * eps / 12;
  s.eps_p = eps * eps / 4;
  const Rat e24 = s.e24;
  const Rat e12 = s.e12;
  const Rat eps_p = s.eps_p;
  s.chi_with_ptilde = [M, e24, e12](const Int& k) -> std::pair<Int, Int> {
    const Int kp1 = k + 1;
    const Int m4 = int_pow(M, 4);
    const Int a1 = 48 * M * kp1;
    const Int a2 = 2304 * m4 * kp1 * kp1;
    const Rat inner = Rat(a1) / e24 + Rat(a2) / (e24 * e24);
    const Int psi = iceil(inner) - 1;
    const Int lead = 12 * M * M * kp1;
    const Int pt = iceil(Rat(lead) / e24 * Rat(psi));
    const Int p1 = pt + 1;
    const Int b1 = 8 * M * M * p1;
    const Int b2 = 128 * m4 * p1 * p1;
    const Rat inner2 = Rat(b1) / e12 + Rat(b2) / (e12 * e12);
    const Int chi = iceil(inner2) - 1 + pt;
    return {pt, chi};
  };
  s.theta_k = [M, eps_p](const Int&, const Int& chi) -> Int {
    const Int lead = 3 * M * M * (chi + 1);
    return iceil(Rat(lead) / eps_p) - 1;
  };
  return s;
}

// One tower index: chi*_k(eps^2/12), Theta_k(eps^2/4), the window value
// Delta*_k(eps^2/4, g) and the step count f(k).
MetaRow tower_row(const TowerSetup& s, const Counterexample& g,
                  const Int& kk) {
  MetaRow row;
  row.k = kk;
  const auto pc = s.chi_with_ptilde(kk);
  row.P_tilde = pc.first;
  row.chi = pc.second;
  row.Theta = s.theta_k(kk, row.chi);
  const Int win = row.Theta - row.chi;
  if (win < 0)
    throw std::domain_error("metastability tower: Theta_k < chi*_k at k=" +
                            int_string(kk));
  const Int weight = win + g(win + row.chi);
  if (weight <= 0)
    throw std::invalid_argument(
        "metastability tower: window weight g_eps(Theta_k - chi*_k) is zero "
        "at k=" +
        int_string(kk));
  const Int w3 = 3 * weight;
  row.Delta = s.eps_p / Rat(w3);
  const Int m2 = s.M * s.M;
  const Int steps = iceil(Rat(m2) / row.Delta);
  row.f = (steps > kk ? steps - kk : Int(0));
  return row;
}

struct TowerIteration {
  MetaStatus status = MetaStatus::complete;
  Rat eps0;
  Int ceil_inv_eps0;
  Int J;
  Int steps_done;
  Int K_end;
  std::vector<MetaRow> rows;
  bool rows_truncated = false;
  std::string note;
};

// k_{j+1} = f~*(k_j) = k_j + f(k_j + ceil(1/eps0)) + ceil(1/eps0), from
// k_0 = 0, for J = ceil(M^2/eps0^2) steps or until a budget stops it. f~* is
// strictly increasing, so a truncated run still certifies every downstream
// max as a lower bound.
TowerIteration run_tower(const Rat& eps, const Counterexample& g,
                         const TowerSetup& s, const MetaBudget& budget) {
  TowerIteration it;
  const Int mp1 = (s.M + 1) * (s.M + 1);
  const Int den = 24 * mp1;
  it.eps0 = eps * eps / Rat(den);
  it.ceil_inv_eps0 = iceil(1 / it.eps0);
  const Int m2 = s.M * s.M;
  it.J = iceil(Rat(m2) / (it.eps0 * it.eps0));
  Int k = 0;
  Int j = 0;
  while (j < it.J) {
    if (j >= budget.max_steps) {
      it.status = MetaStatus::partial_steps;
      it.note = "stopped after " + int_string(j) + " of " + int_string(it.J) +
                " tower steps (max_steps)";
      break;
    }
    if (bit_size(k) > budget.max_value_bits) {
      it.status = MetaStatus::partial_bits;
      it.note = "stopped after " + int_string(j) + " of " + int_string(it.J) +
                " tower steps (iterate exceeds " +
                std::to_string(budget.max_value_bits) + " bits)";
      break;
    }
    MetaRow row;
    try {
      row = tower_row(s, g, k + it.ceil_inv_eps0);
    } catch (const std::overflow_error& e) {
      it.status = MetaStatus::partial_bits;
      it.note = "stopped after " + int_string(j) + " of " + int_string(it.J) +
                " tower steps (" + e.what() + ")";
      break;
    }
    const Int k_next = k + row.f + it.ceil_inv_eps0;
    if (static_cast<long>(it.rows.size()) < budget.max_rows)
      it.rows.push_back(std::move(row));
    else
      it.rows_truncated = true;
    k = k_next;
    ++j;
  }
  it.steps_done = j;
  it.K_end = k;
  return it;
}

struct TowerMax {
  Int best = -1;   // max of the route's target values over evaluated ks
  Int gamma = -1;  // max of chi*_k over the same ks
  Int enum_count = 0;
  bool full = false;  // every k in [lo, hi] contributed
};

// Final max over k in [ceil(1/eps0), K_end + ceil(1/eps0)]. Enumerates the
// whole range when it fits in max_enum (reusing the recorded rows);
// otherwise falls back to the recorded rows plus the top index, which stays
// a certified lower bound. Candidates whose evaluation overflows the exact
// exponential budget are skipped (and the max degrades to a lower bound).
TowerMax tower_max(const TowerSetup& s, const Counterexample& g,
                   TowerIteration& it, const MetaBudget& budget,
                   bool value_is_theta) {
  TowerMax out;
  const Int lo = it.ceil_inv_eps0;
  const Int hi = it.K_end + it.ceil_inv_eps0;
  const Int width = it.K_end + 1;
  if (width <= budget.max_enum) {
    std::map<Int, std::pair<Int, Int>> memo;  // k -> (chi, Theta)
    for (const auto& r : it.rows)
      memo.emplace(r.k, std::make_pair(r.chi, r.Theta));
    out.full = true;
    for (Int k = lo; k <= hi; ++k) {
      Int chi;
      Int value;
      const auto mit = memo.find(k);
      if (mit != memo.end()) {
        chi = mit->second.first;
        value = value_is_theta ? mit->second.second : chi;
      } else {
        try {
          chi = s.chi_with_ptilde(k).second;
          value = value_is_theta ? s.theta_k(k, chi) : chi;
        } catch (const std::overflow_error&) {
          out.full = false;
          continue;
        }
      }
      ++out.enum_count;
      if (chi > out.gamma) out.gamma = chi;
      if (value > out.best) out.best = value;
    }
    return out;
  }
  for (const auto& r : it.rows) {
    ++out.enum_count;
    if (r.chi > out.gamma) out.gamma = r.chi;
    const Int value = value_is_theta ? r.Theta : r.chi;
    if (value > out.best) out.best = value;
  }
  try {
    if (value_is_theta) {
      MetaRow top = tower_row(s, g, hi);
      ++out.enum_count;
      if (top.chi > out.gamma) out.gamma = top.chi;
      if (top.Theta > out.best) out.best = top.Theta;
      if (static_cast<long>(it.rows.size()) < budget.max_rows)
        it.rows.push_back(std::move(top));
      else
        it.rows_truncated = true;
    } else {
      const Int chi = s.chi_with_ptilde(hi).second;
      ++out.enum_count;
      if (chi > out.gamma) out.gamma = chi;
      if (chi > out.best) out.best = chi;
    }
  } catch (const std::overflow_error&) {
    // the top index is out of reach; the recorded rows already bound Sigma
  }
  return out;
}

MetastabilityBound assemble(const Rat& eps, const Int& M, TowerIteration&& it,
                            const char* provenance) {
  MetastabilityBound out;
  out.status = it.status;
  out.eps = eps;
  out.eps0 = it.eps0;
  out.M = M;
  out.ceil_inv_eps0 = it.ceil_inv_eps0;
  out.J = it.J;
  out.steps_done = it.steps_done;
  out.K_end = it.K_end;
  out.rows = std::move(it.rows);
  out.rows_recorded = static_cast<long>(out.rows.size());
  out.enum_count = 0;
  out.provenance = provenance;
  out.sigma_is_exact = (out.status == MetaStatus::complete);
  out.detail = it.note.empty()
                   ? "tower complete: " + int_string(it.steps_done) +
                         " steps, K_end=" + int_string(it.K_end)
                   : it.note;
  if (it.rows_truncated)
    out.detail += "; row recording capped";
  return out;
}

void note_lower_bound(MetastabilityBound& out) {
  out.sigma_is_exact = false;
  out.detail += "; sigma is a certified lower bound";
}

}  // namespace

const char* meta_status_name(MetaStatus status) {
  switch (status) {
    case MetaStatus::complete: return "complete";
    case MetaStatus::partial_steps: return "partial_steps";
    case MetaStatus::partial_bits: return "partial_bits";
    case MetaStatus::partial_enum: return "partial_enum";
  }
  return "unknown";
}

RegularityRates asreg_rate_div(const Rat& eps, const Int& M,
                               const ScalarSchedule& schedule) {
  check_eps_lt(eps, 2, "asreg_rate_div");
  check_M(M, "asreg_rate_div");
  if (!schedule.theta_div)
    throw std::invalid_argument("asreg_rate_div: schedule '" + schedule.name +
                                "' has no divergence rate theta_div");
  const DivergenceRate& theta = *schedule.theta_div;
  const Int m4 = 4 * M;
  const Int m8 = 8 * M;
  RegularityRates out;
  out.provenance = "div";
  const Int b1 = schedule.beta(eps / Rat(m4));
  const Int l1 = Int(ceil_ln(Rat(2 * M) / eps));
  out.phi_tilde = theta(b1 + 1 + l1) + 1;
  const Int b2 = schedule.beta(eps / Rat(m8));
  const Int l2 = Int(ceil_ln(Rat(4 * M) / eps));
  const Int via_theta = theta(b2 + 1 + l2) + 1;
  const Int via_alpha = schedule.alpha(eps / Rat(m4));
  out.phi = via_theta > via_alpha ? via_theta : via_alpha;
  return out;
}

RegularityRates asreg_rate_prod(const Rat& eps, const Int& M,
                                const ScalarSchedule& schedule) {
  check_eps_lt(eps, 2, "asreg_rate_prod");
  check_M(M, "asreg_rate_prod");
  if (!schedule.theta_prod)
    throw std::invalid_argument("asreg_rate_prod: schedule '" + schedule.name +
                                "' has no product rate theta_prod");
  if (!schedule.product_lower_bound)
    throw std::invalid_argument("asreg_rate_prod: schedule '" + schedule.name +
                                "' has no product_lower_bound");
  const EpsModulus& tp = *schedule.theta_prod;
  const Int m4 = 4 * M;
  const Int b = schedule.beta(eps / Rat(m4));
  const Rat D = schedule.product_lower_bound(b);
  if (D <= 0 || D > 1)
    throw std::domain_error(
        "asreg_rate_prod: product lower bound must lie in (0,1], got " +
        rat_string(D) + " at m=" + int_string(b));
  RegularityRates out;
  out.provenance = "prod";
  out.D = D;
  const Int m2 = 2 * M;
  out.phi_tilde = tp(D * eps / Rat(m2)) + 1;
  const Int via_theta = tp(D * eps / Rat(m4)) + 1;
  const Int via_alpha = schedule.alpha(eps / Rat(m4));
  out.phi = via_theta > via_alpha ? via_theta : via_alpha;
  return out;
}

RegularityRates asreg_rate_harmonic(const Rat& eps, const Int& M) {
  check_eps_lt(eps, 1, "asreg_rate_harmonic");
  check_M(M, "asreg_rate_harmonic");
  const Int c2 = 2 * M;
  const Int c8 = 8 * M * M;
  const Int c4 = 4 * M;
  const Int c16 = 16 * M * M;
  RegularityRates out;
  out.provenance = "harmonic";
  out.phi_tilde = iceil(Rat(c2) / eps + Rat(c8) / (eps * eps)) - 1;
  out.phi = iceil(Rat(c4) / eps + Rat(c16) / (eps * eps)) - 1;
  return out;
}

AsregPair make_asreg_div(const Int& M, const ScalarSchedule& schedule) {
  check_M(M, "make_asreg_div");
  if (!schedule.theta_div)
    throw std::invalid_argument("make_asreg_div: schedule '" + schedule.name +
                                "' has no divergence rate theta_div");
  AsregPair pair;
  pair.phi_tilde = [M, schedule](const Rat& e) -> Int {
    return asreg_rate_div(e, M, schedule).phi_tilde;
  };
  pair.phi = [M, schedule](const Rat& e) -> Int {
    return asreg_rate_div(e, M, schedule).phi;
  };
  return pair;
}

AsregPair make_asreg_prod(const Int& M, const ScalarSchedule& schedule) {
  check_M(M, "make_asreg_prod");
  if (!schedule.theta_prod || !schedule.product_lower_bound)
    throw std::invalid_argument(
        "make_asreg_prod: schedule '" + schedule.name +
        "' needs theta_prod and product_lower_bound");
  AsregPair pair;
  pair.phi_tilde = [M, schedule](const Rat& e) -> Int {
    return asreg_rate_prod(e, M, schedule).phi_tilde;
  };
  pair.phi = [M, schedule](const Rat& e) -> Int {
    return asreg_rate_prod(e, M, schedule).phi;
  };
  return pair;
}

AsregPair make_asreg_harmonic(const Int& M) {
  check_M(M, "make_asreg_harmonic");
  AsregPair pair;
  pair.phi_tilde = [M](const Rat& e) -> Int {
    return asreg_rate_harmonic(e, M).phi_tilde;
  };
  pair.phi = [M](const Rat& e) -> Int {
    return asreg_rate_harmonic(e, M).phi;
  };
  return pair;
}

namespace {

TowerSetup div_setup(const Rat& eps, const Int& M,
                     const ScalarSchedule& schedule,
                     const std::optional<AsregPair>& asreg) {
  check_eps_lt(eps, 2, "meta_div");
  check_M(M, "meta_div");
  if (!schedule.theta_div)
    throw std::invalid_argument("meta_div: schedule '" + schedule.name +
                                "' has no divergence rate theta_div");
  const DivergenceRate theta = *schedule.theta_div;
  const AsregPair pair = asreg ? *asreg : make_asreg_div(M, schedule);
  TowerSetup s = generic_setup(eps, M, pair, "meta_div");
  // ceil_ln(3 M^2 / (eps^2/4)) == ceil_ln(12 M^2 / eps^2): the Theta_k offset
  // and the final theta^+ offset coincide.
  const Int c = Int(ceil_ln(Rat(12 * M * M) / (eps * eps)));
  s.theta_k = [theta, c](const Int&, const Int& chi) -> Int {
    const Int arg = chi - 1 + c;
    const Int val = theta(arg);
    if (val < arg)
      throw std::domain_error(
          "meta_div: divergence rate violates theta(n) >= n at n=" +
          int_string(arg));
    return val + 1;
  };
  return s;
}

TowerSetup prod_setup(const Rat& eps, const Int& M,
                      const ScalarSchedule& schedule,
                      const std::optional<AsregPair>& asreg) {
  check_eps_lt(eps, 2, "meta_prod");
  check_M(M, "meta_prod");
  if (!schedule.theta_prod)
    throw std::invalid_argument("meta_prod: schedule '" + schedule.name +
                                "' has no product rate theta_prod");
  if (!schedule.product_lower_bound)
    throw std::invalid_argument("meta_prod: schedule '" + schedule.name +
                                "' has no product_lower_bound");
  const EpsModulus tp = *schedule.theta_prod;
  const auto plb = schedule.product_lower_bound;
  const AsregPair pair = asreg ? *asreg : make_asreg_prod(M, schedule);
  TowerSetup s = generic_setup(eps, M, pair, "meta_prod");
  const Int m2 = M * M;
  const Rat eps_p = s.eps_p;
  s.theta_k = [tp, plb, m2, eps_p](const Int& k, const Int& chi) -> Int {
    const Int idx = chi - 1;
    const Rat D = plb(idx);
    if (D <= 0 || D > 1)
      throw std::domain_error(
          "meta_prod: product lower bound must lie in (0,1], got " +
          rat_string(D) + " at m=" + int_string(idx));
    const Int den = 3 * m2;
    const Int Theta = tp(D * eps_p / Rat(den)) + 1;
    if (Theta < chi)
      throw std::domain_error(
          "meta_prod: Theta_k=" + int_string(Theta) + " undercuts chi*_k=" +
          int_string(chi) + " at k=" + int_string(k) +
          "; theta_prod is too weak for this tower");
    return Theta;
  };
  return s;
}

void check_row_index(const Int& k, const char* who) {
  if (k < 0)
    throw std::invalid_argument(std::string(who) + ": k must be >= 0, got " +
                                int_string(k));
}

}  // namespace

MetastabilityBound meta_div(const Rat& eps, const Counterexample& g,
                            const Int& M, const ScalarSchedule& schedule,
                            const MetaBudget& budget,
                            const std::optional<AsregPair>& asreg) {
  TowerSetup s = div_setup(eps, M, schedule, asreg);
  const DivergenceRate theta = *schedule.theta_div;
  const Int c = Int(ceil_ln(Rat(12 * M * M) / (eps * eps)));
  TowerIteration it = run_tower(eps, g, s, budget);
  TowerMax mx = tower_max(s, g, it, budget, /*value_is_theta=*/false);
  const Int width = it.K_end + 1;
  MetastabilityBound out = assemble(eps, M, std::move(it), "div");
  out.enum_count = mx.enum_count;
  if (out.status == MetaStatus::complete && !mx.full)
    out.status = MetaStatus::partial_enum;
  out.detail += "; inspected " + int_string(mx.enum_count) + " of " +
                int_string(width) + " k values";
  if (mx.gamma < 0) {
    out.sigma = 1;
    out.detail += "; no k value was evaluable, sigma is the trivial bound";
    note_lower_bound(out);
    return out;
  }
  out.Gamma = mx.gamma;
  const Int arg = mx.gamma - 1 + c;
  try {
    out.sigma = theta_plus(theta, arg, budget.max_enum) + 1;
  } catch (const std::length_error& e) {
    // theta(n) >= n gives theta^+(Gamma - 1 + c) + 1 >= Gamma + c.
    if (out.status == MetaStatus::complete)
      out.status = MetaStatus::partial_enum;
    out.detail += std::string("; ") + e.what();
    out.sigma = mx.gamma + c;
  } catch (const std::overflow_error& e) {
    if (out.status == MetaStatus::complete)
      out.status = MetaStatus::partial_enum;
    out.detail += std::string("; ") + e.what();
    out.sigma = mx.gamma + c;
  }
  if (out.status != MetaStatus::complete) note_lower_bound(out);
  return out;
}

MetastabilityBound meta_prod(const Rat& eps, const Counterexample& g,
                             const Int& M, const ScalarSchedule& schedule,
                             const MetaBudget& budget,
                             const std::optional<AsregPair>& asreg) {
  TowerSetup s = prod_setup(eps, M, schedule, asreg);
  TowerIteration it = run_tower(eps, g, s, budget);
  TowerMax mx = tower_max(s, g, it, budget, /*value_is_theta=*/true);
  const Int width = it.K_end + 1;
  MetastabilityBound out = assemble(eps, M, std::move(it), "prod");
  out.enum_count = mx.enum_count;
  if (out.status == MetaStatus::complete && !mx.full)
    out.status = MetaStatus::partial_enum;
  out.detail += "; inspected " + int_string(mx.enum_count) + " of " +
                int_string(width) + " k values";
  if (mx.best < 0) {
    out.sigma = 1;
    out.detail += "; no k value was evaluable, sigma is the trivial bound";
    note_lower_bound(out);
    return out;
  }
  out.Gamma = mx.gamma;
  out.sigma = mx.best;
  if (out.status != MetaStatus::complete) note_lower_bound(out);
  return out;
}

MetastabilityBound meta_harmonic(const Rat& eps, const Counterexample& g,
                                 const Int& M, const MetaBudget& budget) {
  check_eps_lt(eps, 1, "meta_harmonic");
  check_M(M, "meta_harmonic");
  TowerSetup s = harmonic_setup(eps, M);
  TowerIteration it = run_tower(eps, g, s, budget);
  const Int L = it.K_end + it.ceil_inv_eps0;
  // chi*_k increases with k, so the max over [ceil(1/eps0), L] sits at L.
  MetaRow top = tower_row(s, g, L);
  const Int chi_L = top.chi;
  if (static_cast<long>(it.rows.size()) < budget.max_rows)
    it.rows.push_back(std::move(top));
  else
    it.rows_truncated = true;
  MetastabilityBound out = assemble(eps, M, std::move(it), "harmonic");
  out.L = L;
  out.enum_count = 1;
  const Int lead = 12 * M * M * (chi_L + 1);
  out.sigma = iceil(Rat(lead) / (eps * eps)) - 1;
  out.detail += "; L=" + int_string(L);
  if (out.status != MetaStatus::complete) note_lower_bound(out);
  return out;
}

MetaRow meta_div_row(const Rat& eps, const Counterexample& g, const Int& M,
                     const ScalarSchedule& schedule, const Int& k,
                     const std::optional<AsregPair>& asreg) {
  check_row_index(k, "meta_div_row");
  const TowerSetup s = div_setup(eps, M, schedule, asreg);
  return tower_row(s, g, k);
}

MetaRow meta_prod_row(const Rat& eps, const Counterexample& g, const Int& M,
                      const ScalarSchedule& schedule, const Int& k,
                      const std::optional<AsregPair>& asreg) {
  check_row_index(k, "meta_prod_row");
  const TowerSetup s = prod_setup(eps, M, schedule, asreg);
  return tower_row(s, g, k);
}

MetaRow meta_harmonic_row(const Rat& eps, const Counterexample& g,
                          const Int& M, const Int& k) {
  check_row_index(k, "meta_harmonic_row");
  check_eps_lt(eps, 1, "meta_harmonic");
  check_M(M, "meta_harmonic");
  const TowerSetup s = harmonic_setup(eps, M);
  return tower_row(s, g, k);
}

Int browder_K(const Rat& eps, const Counterexample& g, const Int& M) {
  if (eps <= 0)
    throw std::invalid_argument("browder_K: eps must be positive");
  check_M(M, "browder_K");
  const Int m2 = M * M;
  const Int count = iceil(Rat(m2) / (eps * eps));
  const auto tilde = [&g](const Int& k) -> Int { return k + g(k); };
  return iterate_functional(tilde, count, 0).value;
}

namespace {

// max{fn(i) | 0 <= i <= m} by enumeration, capped at enum_budget values.
Int enum_max(const std::function<Int(const Int&)>& fn, const Int& m,
             const Int& enum_budget, const char* who) {
  const Int width = m + 1;
  if (width > enum_budget)
    throw std::length_error(std::string(who) + ": enumeration of " +
                            int_string(width) +
                            " values exceeds the budget");
  Int best = fn(0);
  for (Int i = 1; i <= m; ++i) {
    const Int v = fn(i);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace

Int browder_K_general(const Rat& eps, const Counterexample& g, const Int& M,
                      const std::function<Int(const Int&)>& chi,
                      const std::function<Int(const Int&)>& h,
                      const Int& enum_budget) {
  if (eps <= 0)
    throw std::invalid_argument("browder_K_general: eps must be positive");
  check_M(M, "browder_K_general");
  if (!chi || !h)
    throw std::invalid_argument(
        "browder_K_general: empty parameter function");
  const Int c4 = 4 * M * M;
  const Int count = iceil(Rat(c4) / (eps * eps));
  const auto step = [&](const Int& k) -> Int {
    const Int ck = chi(k);
    const Int m = ck + g(ck);
    return enum_max(h, m, enum_budget, "browder_K_general");
  };
  const Int end = iterate_functional(step, count, 0).value;
  return enum_max(chi, end, enum_budget, "browder_K_general");
}

Int gamma_cesaro_P(const Rat& eps, const Rat& t, const Int& M,
                   const EpsModulus& phi) {
  check_eps_lt(eps, 2, "gamma_cesaro_P");
  if (t <= 0 || t >= 1)
    throw std::invalid_argument(
        "gamma_cesaro_P: t must lie in (0,1), got " + rat_string(t));
  check_M(M, "gamma_cesaro_P");
  const Int c6 = 6 * M;
  const Int phi_v = phi(t * eps / Rat(c6));
  const Int lead = 6 * M * M;
  return iceil(Rat(lead) / (t * eps) * Rat(phi_v));
}

Int gamma_limsup_psi(const Rat& eps, const Rat& t, const Int& M,
                     const EpsModulus& phi, const EpsModulus& phi_tilde) {
  const Int P = gamma_cesaro_P(eps / 2, t, M, phi);
  const Int den = 2 * M * (P + 1);
  return phi_tilde(eps / Rat(den)) + P;
}

std::pair<Rat, Int> rescale(const Rat& eps, const Int& M) {
  if (eps <= 0)
    throw std::invalid_argument("rescale: eps must be positive");
  check_M(M, "rescale");
  return {eps / Rat(M), Int(1)};
}

}  // namespace hiter
