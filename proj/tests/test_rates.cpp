#include "hiter/rates.hpp"

#include "doctest.h"
#include "support/tower_reference.hpp"

#include <stdexcept>
#include <vector>

using namespace hiter;

namespace {

Counterexample g_zero() { return parse_counterexample("g:const:0"); }

// Regularity pair Phi~ = Phi = ceil(1/e) paired with theta(n) = n below: the
// tower then collapses to closed forms a test can predict exactly.
AsregPair inverse_pair() {
  AsregPair p;
  p.phi_tilde = [](const Rat& e) -> Int { return iceil(1 / e); };
  p.phi = [](const Rat& e) -> Int { return iceil(1 / e); };
  return p;
}

ScalarSchedule synthetic_schedule() {
  ScalarSchedule s;
  s.name = "synthetic";
  s.theta_div = DivergenceRate{[](const Int& n) -> Int { return n; }, true};
  return s;
}

towerref::Modulus ref_inverse() {
  return [](const towerref::BRat& e) -> towerref::BInt {
    return towerref::r_ceil(1 / e);
  };
}

towerref::GFun ref_g(const Counterexample& g) {
  return [g](const towerref::BInt& n) -> towerref::BInt { return g(n); };
}

}  // namespace

TEST_CASE("regularity rates match hand-checked values") {
  const ScalarSchedule sq = sqrt_schedule();
  const RegularityRates a = asreg_rate_div(Rat(1), Int(1), sq);
  CHECK(a.phi_tilde == 122);
  CHECK(a.phi == 1262);
  CHECK(a.provenance == "div");
  CHECK(!a.D.has_value());

  const ScalarSchedule h = harmonic_schedule();
  const RegularityRates b = asreg_rate_prod(Rat(1), Int(1), h);
  CHECK(b.phi_tilde == 7);
  CHECK(b.phi == 15);
  CHECK(b.provenance == "prod");
  REQUIRE(b.D.has_value());
  CHECK(*b.D == Rat(1, 2));

  // ceil(e^11) = 59875 and ceil(e^20) = 485165196 drive the harmonic
  // divergence route at eps = 1/2.
  const RegularityRates c = asreg_rate_div(Rat(1, 2), Int(1), h);
  CHECK(c.phi_tilde == 59876);
  CHECK(c.phi == 485165197);

  const RegularityRates d = asreg_rate_harmonic(Rat(1, 2), Int(1));
  CHECK(d.phi_tilde == 35);
  CHECK(d.phi == 71);
  CHECK(d.provenance == "harmonic");

  const RegularityRates e = asreg_rate_harmonic(Rat(1, 10), Int(2));
  CHECK(e.phi_tilde == 3239);
  CHECK(e.phi == 6479);
}

TEST_CASE("regularity rate properties hold on a grid") {
  const ScalarSchedule sq = sqrt_schedule();
  const ScalarSchedule h = harmonic_schedule();
  const std::vector<Rat> grid = {Rat(3, 2), Rat(1), Rat(1, 2), Rat(1, 5),
                                 Rat(1, 16)};
  for (const Rat& eps : grid) {
    for (const Int& M : {Int(1), Int(2), Int(5)}) {
      // the residual rate dominates the step rate at half precision
      const RegularityRates r = asreg_rate_div(eps, M, sq);
      const RegularityRates rh = asreg_rate_div(eps / 2, M, sq);
      CHECK(r.phi >= rh.phi_tilde);
      CHECK(r.phi >= r.phi_tilde);
      const RegularityRates p = asreg_rate_prod(eps, M, h);
      CHECK(p.phi >= p.phi_tilde);
      if (eps < 1) {
        const RegularityRates q = asreg_rate_harmonic(eps, M);
        CHECK(q.phi >= q.phi_tilde);
        // shrinking eps can only push both indices up
        const RegularityRates q2 = asreg_rate_harmonic(eps / 2, M);
        CHECK(q2.phi >= q.phi);
        CHECK(q2.phi_tilde >= q.phi_tilde);
      }
    }
  }
}

TEST_CASE("regularity rate domains are validated") {
  const ScalarSchedule h = harmonic_schedule();
  const ScalarSchedule sq = sqrt_schedule();
  CHECK_THROWS_AS(asreg_rate_div(Rat(2), Int(1), sq), std::invalid_argument);
  CHECK_THROWS_AS(asreg_rate_div(Rat(0), Int(1), sq), std::invalid_argument);
  CHECK_THROWS_AS(asreg_rate_div(Rat(1), Int(0), sq), std::invalid_argument);
  CHECK_THROWS_AS(asreg_rate_prod(Rat(2), Int(1), h), std::invalid_argument);
  CHECK_THROWS_AS(asreg_rate_harmonic(Rat(1), Int(1)), std::invalid_argument);
  CHECK_THROWS_AS(asreg_rate_harmonic(Rat(1, 2), Int(0)),
                  std::invalid_argument);

  // the sqrt schedule carries no product rate; the harmonic one carries both
  CHECK_THROWS_AS(asreg_rate_prod(Rat(1), Int(1), sq), std::invalid_argument);
  ScalarSchedule stripped = harmonic_schedule();
  stripped.theta_div.reset();
  CHECK_THROWS_AS(asreg_rate_div(Rat(1), Int(1), stripped),
                  std::invalid_argument);
}

TEST_CASE("regularity pair factories defer to the rate functions") {
  const ScalarSchedule h = harmonic_schedule();
  const ScalarSchedule sq = sqrt_schedule();
  const AsregPair d = make_asreg_div(Int(1), sq);
  CHECK(d.phi_tilde(Rat(1)) == 122);
  CHECK(d.phi(Rat(1)) == 1262);
  const AsregPair p = make_asreg_prod(Int(1), h);
  CHECK(p.phi_tilde(Rat(1)) == 7);
  CHECK(p.phi(Rat(1)) == 15);
  const AsregPair hm = make_asreg_harmonic(Int(2));
  CHECK(hm.phi(Rat(1, 10)) == 6479);
  CHECK_THROWS_AS(make_asreg_prod(Int(1), sq), std::invalid_argument);
}

TEST_CASE("harmonic tower rows match an independent transcription") {
  const Counterexample g0 = g_zero();
  const Counterexample g1 = parse_counterexample("g:affine:1:0");
  for (const Rat& eps : {Rat(1, 2), Rat(3, 4)}) {
    for (const Counterexample* g : {&g0, &g1}) {
      for (const Int& k : {Int(0), Int(1), Int(2), Int(3), Int(384)}) {
        const MetaRow mine = meta_harmonic_row(eps, *g, Int(1), k);
        const towerref::Row ref =
            towerref::harmonic_row(eps, ref_g(*g), 1, k);
        CHECK(mine.k == ref.k);
        CHECK(mine.P_tilde == ref.P);
        CHECK(mine.chi == ref.chi);
        CHECK(mine.Theta == ref.Theta);
        CHECK(mine.Delta == ref.Delta);
        CHECK(mine.f == ref.f);
      }
    }
  }
  // M = 2 spot check against the transcription
  const MetaRow m2 = meta_harmonic_row(Rat(1, 2), g0, Int(2), Int(5));
  const towerref::Row r2 = towerref::harmonic_row(Rat(1, 2), ref_g(g0), 2, 5);
  CHECK(m2.chi == r2.chi);
  CHECK(m2.Theta == r2.Theta);
  CHECK(m2.f == r2.f);

  // the closed form pinned at unit argument
  CHECK(towerref::harmonic_ptilde(towerref::BRat(1), 1, 0) == 28212);
}

TEST_CASE("product route reproduces the closed-form tower") {
  const ScalarSchedule h = harmonic_schedule();
  const AsregPair psi = make_asreg_harmonic(Int(1));
  const Counterexample g0 = g_zero();
  const Counterexample g10 = parse_counterexample("g:const:10");
  for (const Rat& eps : {Rat(1, 2), Rat(3, 4)}) {
    for (const Counterexample* g : {&g0, &g10}) {
      for (const Int& k : {Int(0), Int(1), Int(2), Int(3)}) {
        const MetaRow prod = meta_prod_row(eps, *g, Int(1), h, k, psi);
        const MetaRow closed = meta_harmonic_row(eps, *g, Int(1), k);
        CHECK(prod.P_tilde == closed.P_tilde);
        CHECK(prod.chi == closed.chi);
        CHECK(prod.Theta == closed.Theta);
        CHECK(prod.Delta == closed.Delta);
        CHECK(prod.f == closed.f);
      }
    }
  }
}

TEST_CASE("synthetic divergence tower completes exactly") {
  const ScalarSchedule syn = synthetic_schedule();
  const AsregPair pair = inverse_pair();
  const Counterexample g0 = g_zero();
  const MetastabilityBound out =
      meta_div(Rat(1), g0, Int(1), syn, MetaBudget{}, pair);
  CHECK(out.status == MetaStatus::complete);
  CHECK(out.sigma_is_exact);
  CHECK(out.provenance == "div");
  CHECK(out.eps0 == Rat(1, 96));
  CHECK(out.ceil_inv_eps0 == 96);
  CHECK(out.J == 9216);
  CHECK(out.steps_done == 9216);
  CHECK(out.K_end == 884736);
  CHECK(out.rows_recorded == 9216);
  CHECK(out.enum_count == 884737);
  REQUIRE(out.Gamma.has_value());
  CHECK(!out.L.has_value());

  // chi*_k = 49 (288 (k+1))^2 + 48 for this pair; the max sits at the top
  const Int top = 288 * Int(884833);
  const Int gamma_expected = 49 * top * top + 48;
  CHECK(*out.Gamma == gamma_expected);
  CHECK(out.sigma == gamma_expected + 3);

  REQUIRE(out.rows.size() == 9216);
  const MetaRow& r0 = out.rows.front();
  const Int p0 = 288 * Int(97);
  CHECK(r0.k == 96);
  CHECK(r0.P_tilde == p0 * p0);
  CHECK(r0.chi == 49 * p0 * p0 + 48);
  CHECK(r0.Theta == r0.chi + 3);
  CHECK(r0.Delta == Rat(1, 36));
  CHECK(r0.f == 0);
  CHECK(out.rows.back().k == 884736);

  const towerref::DivTower ref = towerref::div_tower(
      towerref::BRat(1), ref_g(g0), 1, ref_inverse(), ref_inverse(),
      [](const towerref::BInt& n) -> towerref::BInt { return n; },
      towerref::BInt(1) << 30);
  CHECK(ref.complete);
  CHECK(out.K_end == ref.K_end);
  CHECK(*out.Gamma == ref.Gamma);
  CHECK(out.sigma == ref.Sigma);
  REQUIRE(ref.rows.size() == 9216);
  for (std::size_t i : {std::size_t(0), std::size_t(1), std::size_t(9215)}) {
    CHECK(out.rows[i].k == ref.rows[i].k);
    CHECK(out.rows[i].chi == ref.rows[i].chi);
    CHECK(out.rows[i].Theta == ref.rows[i].Theta);
    CHECK(out.rows[i].Delta == ref.rows[i].Delta);
    CHECK(out.rows[i].f == ref.rows[i].f);
  }
}

TEST_CASE("partial budgets yield certified lower bounds") {
  const ScalarSchedule syn = synthetic_schedule();
  const AsregPair pair = inverse_pair();
  const Counterexample g0 = g_zero();
  const auto ref_theta = [](const towerref::BInt& n) -> towerref::BInt {
    return n;
  };

  SUBCASE("step budget") {
    MetaBudget b;
    b.max_steps = 100;
    const MetastabilityBound out = meta_div(Rat(1), g0, Int(1), syn, b, pair);
    CHECK(out.status == MetaStatus::partial_steps);
    CHECK(!out.sigma_is_exact);
    CHECK(out.steps_done == 100);
    CHECK(out.K_end == 9600);
    const towerref::DivTower ref =
        towerref::div_tower(towerref::BRat(1), ref_g(g0), 1, ref_inverse(),
                            ref_inverse(), ref_theta, 100);
    CHECK(!ref.complete);
    CHECK(out.K_end == ref.K_end);
    CHECK(*out.Gamma == ref.Gamma);
    CHECK(out.sigma == ref.Sigma);
  }

  SUBCASE("bit budget") {
    MetaBudget b;
    b.max_value_bits = 16;
    const MetastabilityBound out = meta_div(Rat(1), g0, Int(1), syn, b, pair);
    CHECK(out.status == MetaStatus::partial_bits);
    CHECK(!out.sigma_is_exact);
    CHECK(out.steps_done == 683);
    CHECK(out.K_end == 65568);
    const towerref::DivTower ref =
        towerref::div_tower(towerref::BRat(1), ref_g(g0), 1, ref_inverse(),
                            ref_inverse(), ref_theta, 683);
    CHECK(out.K_end == ref.K_end);
    CHECK(*out.Gamma == ref.Gamma);
    CHECK(out.sigma == ref.Sigma);
  }

  SUBCASE("enumeration budget") {
    MetaBudget b;
    b.max_enum = 1000;
    const MetastabilityBound out = meta_div(Rat(1), g0, Int(1), syn, b, pair);
    CHECK(out.status == MetaStatus::partial_enum);
    CHECK(!out.sigma_is_exact);
    CHECK(out.steps_done == 9216);  // the iteration itself completed
    // the fallback inspects the recorded rows plus the top index, and the
    // top index carries the true max here
    CHECK(out.enum_count == 9217);
    const towerref::DivTower ref =
        towerref::div_tower(towerref::BRat(1), ref_g(g0), 1, ref_inverse(),
                            ref_inverse(), ref_theta, towerref::BInt(1) << 30);
    CHECK(*out.Gamma == ref.Gamma);
    CHECK(out.sigma == ref.Sigma);
  }
}

TEST_CASE("budgeted harmonic tower matches the transcription bit for bit") {
  const Counterexample g0 = g_zero();
  MetaBudget b;
  b.max_value_bits = 4096;
  const MetastabilityBound out = meta_harmonic(Rat(1, 2), g0, Int(1), b);
  CHECK(out.status == MetaStatus::partial_bits);
  CHECK(!out.sigma_is_exact);
  CHECK(out.provenance == "harmonic");
  CHECK(out.eps0 == Rat(1, 384));
  CHECK(out.ceil_inv_eps0 == 384);
  CHECK(out.J == 147456);
  CHECK(out.steps_done == 3);
  CHECK(bit_size(out.K_end) > 4096);
  REQUIRE(out.L.has_value());
  CHECK(*out.L == out.K_end + 384);

  const towerref::HarmonicTower ref =
      towerref::harmonic_tower(towerref::BRat(1, 2), ref_g(g0), 1, 3);
  CHECK(out.K_end == ref.K_end);
  CHECK(*out.L == ref.L);
  CHECK(out.sigma == ref.Sigma);
  REQUIRE(out.rows.size() == 4);  // three visited rows plus the row at L
  REQUIRE(ref.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out.rows[i].k == ref.rows[i].k);
    CHECK(out.rows[i].P_tilde == ref.rows[i].P);
    CHECK(out.rows[i].chi == ref.rows[i].chi);
    CHECK(out.rows[i].Theta == ref.rows[i].Theta);
    CHECK(out.rows[i].Delta == ref.rows[i].Delta);
    CHECK(out.rows[i].f == ref.rows[i].f);
  }
  CHECK(out.rows.back().k == *out.L);
  CHECK(out.rows.back().chi == ref.chi_L);

  // determinism: the same budget reproduces the same bound bit for bit
  const MetastabilityBound again = meta_harmonic(Rat(1, 2), g0, Int(1), b);
  CHECK(again.sigma == out.sigma);
  CHECK(again.steps_done == out.steps_done);
  CHECK(again.K_end == out.K_end);

  // a second grid point with a nontrivial counterexample function
  const Counterexample g23 = parse_counterexample("g:affine:2:3");
  const MetastabilityBound out2 = meta_harmonic(Rat(3, 4), g23, Int(2), b);
  CHECK(out2.status == MetaStatus::partial_bits);
  const towerref::HarmonicTower ref2 = towerref::harmonic_tower(
      towerref::BRat(3, 4), ref_g(g23), 2,
      towerref::BInt(out2.steps_done));
  CHECK(out2.K_end == ref2.K_end);
  CHECK(out2.sigma == ref2.Sigma);
}

TEST_CASE("tower step count equals the proof form") {
  // f(k) = max{ceil(M^2/Delta), k} - k coincides with the rate-of-convergence
  // composition gamma(Delta/M^2), gamma(e) = ceil(1/e), capped at k.
  const Counterexample g = parse_counterexample("g:affine:1:2");
  for (const Rat& eps : {Rat(1, 2), Rat(3, 4)}) {
    for (const Int& M : {Int(1), Int(2)}) {
      for (const Int& k : {Int(0), Int(7), Int(100)}) {
        const MetaRow row = meta_harmonic_row(eps, g, M, k);
        const Rat scaled = row.Delta / Rat(M * M);
        const Int gamma_form = iceil(1 / scaled);
        const Int f_proof = (gamma_form > k ? gamma_form - k : Int(0));
        CHECK(row.f == f_proof);
      }
    }
  }
}

TEST_CASE("metastability bounds are monotone under larger counterexamples") {
  const Counterexample g0 = g_zero();
  const Counterexample g10 = parse_counterexample("g:const:10");
  const Counterexample gn = parse_counterexample("g:affine:1:0");
  MetaBudget b;
  b.max_value_bits = 4096;
  const Int s0 = meta_harmonic(Rat(1, 2), g0, Int(1), b).sigma;
  const Int s10 = meta_harmonic(Rat(1, 2), g10, Int(1), b).sigma;
  const Int sn = meta_harmonic(Rat(1, 2), gn, Int(1), b).sigma;
  CHECK(s0 <= s10);
  CHECK(s10 <= sn);
  // shrinking eps cannot shrink the bound
  const Int s_small = meta_harmonic(Rat(1, 4), g0, Int(1), b).sigma;
  CHECK(s0 <= s_small);
}

TEST_CASE("metastability domains and invariants are enforced") {
  const ScalarSchedule h = harmonic_schedule();
  const Counterexample g0 = g_zero();
  CHECK_THROWS_AS(meta_harmonic(Rat(1), g0, Int(1)), std::invalid_argument);
  CHECK_THROWS_AS(meta_harmonic(Rat(2), g0, Int(1)), std::invalid_argument);
  CHECK_THROWS_AS(meta_harmonic(Rat(1, 2), g0, Int(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(meta_harmonic_row(Rat(1, 2), g0, Int(1), Int(-1)),
                  std::invalid_argument);

  ScalarSchedule no_div = harmonic_schedule();
  no_div.theta_div.reset();
  CHECK_THROWS_AS(meta_div(Rat(1), g0, Int(1), no_div),
                  std::invalid_argument);
  ScalarSchedule no_prod = sqrt_schedule();
  CHECK_THROWS_AS(meta_prod(Rat(1), g0, Int(1), no_prod),
                  std::invalid_argument);

  // a divergence rate that undercuts theta(n) >= n is rejected
  ScalarSchedule weak = synthetic_schedule();
  weak.theta_div = DivergenceRate{
      [](const Int& n) -> Int { return n / 2; }, true};
  CHECK_THROWS_AS(meta_div(Rat(1), g0, Int(1), weak, {}, inverse_pair()),
                  std::domain_error);

  // a product rate too weak to dominate chi*_k is rejected
  ScalarSchedule feeble = harmonic_schedule();
  feeble.theta_prod->fn = [](const Rat&) -> Int { return 1; };
  CHECK_THROWS_AS(meta_prod(Rat(1), g0, Int(1), feeble, {},
                            make_asreg_harmonic(Int(1))),
                  std::domain_error);
}

TEST_CASE("resolvent family bound") {
  const Counterexample succ = parse_counterexample("g:affine:1:1");
  CHECK(browder_K(Rat(1), succ, Int(1)) == 1);
  CHECK(browder_K(Rat(1, 2), succ, Int(1)) == 15);
  CHECK(browder_K(Rat(1), g_zero(), Int(1)) == 0);

  // pointwise larger g cannot shrink K
  const Counterexample big = parse_counterexample("g:affine:2:3");
  CHECK(browder_K(Rat(1, 2), succ, Int(1)) <=
        browder_K(Rat(1, 2), big, Int(1)));
  CHECK(browder_K(Rat(1, 2), succ, Int(1)) <=
        browder_K(Rat(1, 4), succ, Int(1)));

  CHECK_THROWS_AS(browder_K(Rat(0), succ, Int(1)), std::invalid_argument);
  CHECK_THROWS_AS(browder_K(Rat(1), succ, Int(0)), std::invalid_argument);
}

TEST_CASE("resolvent family bound with general parameters") {
  const auto ident = [](const Int& k) -> Int { return k; };
  const auto succ_fn = [](const Int& k) -> Int { return k + 1; };
  CHECK(browder_K_general(Rat(1), g_zero(), Int(1), succ_fn, ident) == 5);
  CHECK(browder_K_general(Rat(1), g_zero(), Int(1), ident, ident) == 0);
  // a larger g cannot shrink the bound
  const Counterexample g10 = parse_counterexample("g:const:10");
  CHECK(browder_K_general(Rat(1), g_zero(), Int(1), succ_fn, ident) <=
        browder_K_general(Rat(1), g10, Int(1), succ_fn, ident));
  CHECK_THROWS_AS(browder_K_general(Rat(1), g10, Int(1), ident, ident,
                                    Int(4)),
                  std::length_error);
  CHECK_THROWS_AS(browder_K_general(Rat(0), g_zero(), Int(1), ident, ident),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      browder_K_general(Rat(1), g_zero(), Int(1), nullptr, ident),
      std::invalid_argument);
}

TEST_CASE("gamma sequence rates") {
  EpsModulus inv;
  inv.fn = [](const Rat& e) -> Int { return iceil(1 / e); };
  EpsModulus one;
  one.fn = [](const Rat&) -> Int { return 1; };

  CHECK(gamma_cesaro_P(Rat(1), Rat(1, 2), Int(1), inv) == 144);
  CHECK(gamma_cesaro_P(Rat(1), Rat(1, 2), Int(1), one) == 12);
  CHECK(gamma_cesaro_P(Rat(1, 2), Rat(1, 2), Int(1), inv) == 576);
  const Int psi = gamma_limsup_psi(Rat(1), Rat(1, 2), Int(1), inv, inv);
  CHECK(psi == 1730);
  CHECK(psi >= gamma_cesaro_P(Rat(1, 2), Rat(1, 2), Int(1), inv));

  CHECK_THROWS_AS(gamma_cesaro_P(Rat(1), Rat(1), Int(1), inv),
                  std::invalid_argument);
  CHECK_THROWS_AS(gamma_cesaro_P(Rat(2), Rat(1, 2), Int(1), inv),
                  std::invalid_argument);
  CHECK_THROWS_AS(gamma_limsup_psi(Rat(1), Rat(0), Int(1), inv, inv),
                  std::invalid_argument);
}

TEST_CASE("rescaling to unit bound") {
  const auto r = rescale(Rat(1), Int(4));
  CHECK(r.first == Rat(1, 4));
  CHECK(r.second == 1);
  const auto s = rescale(Rat(3, 7), Int(1));
  CHECK(s.first == Rat(3, 7));
  CHECK(s.second == 1);
  CHECK_THROWS_AS(rescale(Rat(1), Int(0)), std::invalid_argument);
  CHECK_THROWS_AS(rescale(Rat(0), Int(1)), std::invalid_argument);
}
