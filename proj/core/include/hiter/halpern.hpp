#pragma once
// Iteration engines: the Halpern orbit x_{n+1} = lambda_{n+1} u (+)
// (1-lambda_{n+1}) T x_n, Banach iteration for the resolvent fixed points
// z_t^u of T_t^u(y) = t u (+) (1-t) T y, the derived scalar sequences
// gamma_n^k and a_n, and per-step slack checks for the inequalities the bound
// calculators rely on.

#include "hiter/geometry.hpp"
#include "hiter/maps.hpp"
#include "hiter/moduli.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hiter {

struct HalpernConfig {
  SpacePtr space;
  NonexpansiveMap T;
  Point u;  // anchor
  Point x;  // start
  ScalarSchedule schedule;
  long horizon = 1;          // last index H; the orbit is x_0..x_H
  bool store_points = true;  // disable for multi-million-step runs
};

// Orbit with per-step distances cached at build time. Sequences are indexed by
// the orbit index n: asreg[n] = d(x_n, T x_n) and to_anchor[n] = d(x_n, u) for
// n = 0..H, step[n] = d(x_n, x_{n+1}) for n = 0..H-1, lambda[n] = lambda_n for
// n = 1..H (entry 0 unused). With store_points off, points holds {x_0, x_H}.
struct Trajectory {
  std::vector<Point> points;
  std::vector<double> asreg;
  std::vector<double> step;
  std::vector<double> to_anchor;
  std::vector<double> lambda;
  long horizon = 0;
  bool stored_points = true;
  SpacePtr space;
  NonexpansiveMap T;
  Point u;
};

// Runs the recurrence as combine(u, T x_n, 1 - lambda_{n+1}), so the weight
// lambda_{n+1} falls on the anchor u. The map image is checked to stay inside
// the space at every step (domain_error otherwise).
Trajectory halpern_run(const HalpernConfig& config);

struct ResolventPoint {
  double t = 0;
  Point u;
  Point z;
  double residual = 0;  // d(z, T_t^u z), certified <= the requested tolerance
  long steps = 0;       // Banach iterations performed
};

// Iterates y <- T_t^u(y) from y_0 = u. The step count comes from the a priori
// contraction estimate ceil(ln(tol/M)/ln(1-t)), capped at 10^7 (for t near 0
// the final residual check is the sole certificate). Requires t in (0,1]; at
// t = 1 the resolvent is u itself. Throws runtime_error if the residual ends
// up above tol.
ResolventPoint resolvent_point(const GeodesicSpace& space,
                               const NonexpansiveMap& T, const Point& u,
                               const Rat& t, double tol);

// gamma_n^k = (k/(k+1)) d^2(u, T z) - d^2(x_{n+1}, u) for n = 1..H-1, with
// z the resolvent point at t = 1/(k+1) for the same anchor (argument error
// otherwise). Returned vector holds gamma_1 at index 0.
std::vector<double> gamma_sequence(const Trajectory& traj, const Int& k,
                                   const ResolventPoint& z);

// a_n = d^2(y_n, T y_n) + 2 M d(y_n, T y_n) with y_n := x_{n+1}, n = 1..H-1.
// Returned vector holds a_1 at index 0. Each a_n lies in [0, 3M^2].
std::vector<double> a_sequence(const Trajectory& traj, const Int& M);

// One inequality (or construction identity) tracked across a trajectory.
// For inequalities slack = min over steps of RHS - LHS; for equalities
// slack = -max |LHS - RHS|, so pass is uniformly slack >= -tol. Entries with
// an empty index range report slack +infinity and argmin -1.
struct SlackEntry {
  std::string name;
  double slack = 0;
  long argmin = -1;
  bool equality = false;
  bool pass = true;
};

struct SlackReport {
  std::vector<SlackEntry> entries;
  double min_slack = 0;
  bool pass = true;
};

// Checks, at every step, the construction identities (combine_near_side,
// combine_far_side), the step/anchor inequalities (map_point_anchor,
// asreg_vs_step, anchor_contraction, step_split, step_recursion and the
// 2M-coefficient variants asreg_vs_step_M, step_recursion_M), and per t in
// t_list the resolvent descent inequality
//   d^2(x_{n+1},z) <= (1-l_{n+1}) d^2(x_n,z)
//                     + l_{n+1}((1-t) d^2(u,Tz) - d^2(x_{n+1},u)) + M^2 t
// (resolvent_descent:t=...) and the resolvent gap inequality
//   d^2(y_n,z) <= d^2(y_n,u) + (1/t) a_n - (1-t) d^2(u,Tz)
// (resolvent_gap:t=...). Resolvents are computed internally at tolerance
// 1e-10. Requires stored points.
SlackReport check_trajectory_inequalities(const Trajectory& traj,
                                          const std::vector<Rat>& t_list = {},
                                          double tol = 1e-8);

enum class TrajPredicate { asreg, step };

// Least n such that the cached quantity stays <= eps from n through the end
// of its range; nullopt when even the last entry exceeds eps.
std::optional<long> first_index_satisfying(const Trajectory& traj,
                                           TrajPredicate predicate, double eps);

// Least N <= N_max with max - min <= eps over the window [N, N + g(N)] of seq
// (0-based); nullopt when no window passes. A window reaching past the end of
// seq makes the search inconclusive: invalid_argument.
std::optional<long> find_metastable_window(const std::vector<double>& seq,
                                           double eps, const Counterexample& g,
                                           long N_max);

// Metric variant: pairwise d(x_n, x_m) <= eps over the window. Requires
// stored points.
std::optional<long> find_metastable_window(const Trajectory& traj, double eps,
                                           const Counterexample& g,
                                           long N_max);

}  // namespace hiter
