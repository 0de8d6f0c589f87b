#include "hiter/halpern.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hiter {

namespace {

constexpr long kResolventCap = 10'000'000;

double diameter_double(const GeodesicSpace& space) {
  return static_cast<double>(space.diameter_bound());
}

void require_map(const NonexpansiveMap& T) {
  if (!T.fn) throw std::invalid_argument("map has no function attached");
}

}  // namespace

Trajectory halpern_run(const HalpernConfig& config) {
  if (!config.space) throw std::invalid_argument("halpern_run: space is null");
  require_map(config.T);
  if (config.horizon < 1)
    throw std::invalid_argument("halpern_run: horizon must be >= 1");
  const GeodesicSpace& S = *config.space;
  if (!S.contains(config.u))
    throw std::domain_error("halpern_run: anchor u lies outside the space");
  if (!S.contains(config.x))
    throw std::domain_error("halpern_run: start x lies outside the space");

  const long H = config.horizon;
  Trajectory traj;
  traj.horizon = H;
  traj.stored_points = config.store_points;
  traj.space = config.space;
  traj.T = config.T;
  traj.u = config.u;
  traj.asreg.resize(static_cast<std::size_t>(H) + 1);
  traj.to_anchor.resize(static_cast<std::size_t>(H) + 1);
  traj.step.resize(static_cast<std::size_t>(H));
  traj.lambda.assign(static_cast<std::size_t>(H) + 1, 0.0);
  if (config.store_points) traj.points.reserve(static_cast<std::size_t>(H) + 1);

  Point cur = config.x;
  if (config.store_points) traj.points.push_back(cur);
  for (long n = 0; n <= H; ++n) {
    Point img = config.T(cur);
    if (!S.contains(img))
      throw std::domain_error("halpern_run: map image left the space at step " +
                              std::to_string(n));
    const std::size_t i = static_cast<std::size_t>(n);
    traj.asreg[i] = S.dist(cur, img);
    traj.to_anchor[i] = S.dist(cur, config.u);
    if (n == H) break;
    const double lam = rat_double(config.schedule.lambda_at(Int(n + 1)));
    traj.lambda[i + 1] = lam;
    Point next = S.combine(config.u, img, 1.0 - lam);
    traj.step[i] = S.dist(cur, next);
    cur = std::move(next);
    if (config.store_points) traj.points.push_back(cur);
  }
  if (!config.store_points) traj.points = {config.x, cur};
  return traj;
}

ResolventPoint resolvent_point(const GeodesicSpace& space,
                               const NonexpansiveMap& T, const Point& u,
                               const Rat& t, double tol) {
  if (t <= 0 || t > 1)
    throw std::invalid_argument("resolvent parameter t must lie in (0,1]");
  if (!(tol > 0))
    throw std::invalid_argument("resolvent tolerance must be positive");
  require_map(T);
  if (!space.contains(u))
    throw std::domain_error("resolvent anchor u lies outside the space");

  const double td = rat_double(t);
  auto advance = [&](const Point& y) {
    Point img = T(y);
    if (!space.contains(img))
      throw std::domain_error("resolvent iteration: map image left the space");
    return space.combine(u, img, 1.0 - td);
  };

  long steps = 0;
  if (t < 1) {
    const double M = diameter_double(space);
    if (tol < M) {
      const double raw = std::ceil(std::log(tol / M) / std::log1p(-td));
      steps = raw < static_cast<double>(kResolventCap)
                  ? static_cast<long>(raw)
                  : kResolventCap;
    }
  }
  Point y = u;
  for (long i = 0; i < steps; ++i) y = advance(y);

  ResolventPoint out;
  out.t = td;
  out.u = u;
  out.z = y;
  out.steps = steps;
  out.residual = space.dist(y, advance(y));
  if (out.residual > tol)
    throw std::runtime_error(
        "resolvent iteration failed to certify residual " +
        std::to_string(out.residual) + " <= tolerance after " +
        std::to_string(steps) + " steps");
  return out;
}

std::vector<double> gamma_sequence(const Trajectory& traj, const Int& k,
                                   const ResolventPoint& z) {
  if (!traj.space) throw std::invalid_argument("trajectory has no space");
  if (k < 0) throw std::invalid_argument("gamma_sequence: k must be >= 0");
  if (traj.space->dist(traj.u, z.u) > 1e-12)
    throw std::invalid_argument(
        "gamma_sequence: resolvent anchor differs from trajectory anchor");
  const double kd = k.convert_to<double>();
  if (std::abs(z.t * (kd + 1.0) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "gamma_sequence: resolvent parameter is not 1/(k+1)");
  Point img = traj.T(z.z);
  const double duTz = traj.space->dist(traj.u, img);
  const double coef = kd / (kd + 1.0);
  const long H = traj.horizon;
  std::vector<double> out(H > 0 ? static_cast<std::size_t>(H - 1) : 0);
  for (long n = 1; n < H; ++n) {
    const double da = traj.to_anchor[static_cast<std::size_t>(n) + 1];
    out[static_cast<std::size_t>(n - 1)] = coef * duTz * duTz - da * da;
  }
  return out;
}

std::vector<double> a_sequence(const Trajectory& traj, const Int& M) {
  if (M < 1) throw std::invalid_argument("a_sequence: M must be >= 1");
  const double Md = M.convert_to<double>();
  const long H = traj.horizon;
  std::vector<double> out(H > 0 ? static_cast<std::size_t>(H - 1) : 0);
  for (long n = 1; n < H; ++n) {
    const double d = traj.asreg[static_cast<std::size_t>(n) + 1];
    out[static_cast<std::size_t>(n - 1)] = d * d + 2.0 * Md * d;
  }
  return out;
}

namespace {

struct SlackTracker {
  SlackEntry entry;

  explicit SlackTracker(std::string name, bool equality = false) {
    entry.name = std::move(name);
    entry.equality = equality;
    entry.slack = std::numeric_limits<double>::infinity();
  }

  void observe_slack(double slack, long n) {
    if (slack < entry.slack) {
      entry.slack = slack;
      entry.argmin = n;
    }
  }

  void observe_equality(double lhs, double rhs, long n) {
    observe_slack(-std::abs(lhs - rhs), n);
  }

  SlackEntry finish(double tol) {
    entry.pass = entry.slack >= -tol;
    return entry;
  }
};

}  // namespace

SlackReport check_trajectory_inequalities(const Trajectory& traj,
                                          const std::vector<Rat>& t_list,
                                          double tol) {
  if (!traj.space) throw std::invalid_argument("trajectory has no space");
  if (!traj.stored_points)
    throw std::invalid_argument(
        "check_trajectory_inequalities requires stored points");
  const GeodesicSpace& S = *traj.space;
  const long H = traj.horizon;
  const auto& X = traj.points;
  const double M = diameter_double(S);

  SlackTracker near_side("combine_near_side", true);
  SlackTracker far_side("combine_far_side", true);
  SlackTracker map_anchor("map_point_anchor");
  SlackTracker asreg_step("asreg_vs_step");
  SlackTracker anchor_contr("anchor_contraction");
  SlackTracker step_split("step_split");
  SlackTracker step_rec("step_recursion");
  SlackTracker asreg_step_M("asreg_vs_step_M");
  SlackTracker step_rec_M("step_recursion_M");

  struct ResolventCheck {
    double t;
    double duTz2;  // d^2(u, T z)
    std::vector<double> dz;  // dz[n] = d(x_n, z)
    SlackTracker descent;
    SlackTracker gap;
  };
  std::vector<ResolventCheck> res;
  res.reserve(t_list.size());
  for (const Rat& t : t_list) {
    ResolventPoint z = resolvent_point(S, traj.T, traj.u, t, 1e-10);
    Point img = traj.T(z.z);
    ResolventCheck rc{rat_double(t),
                      0.0,
                      {},
                      SlackTracker("resolvent_descent:t=" + rat_string(t)),
                      SlackTracker("resolvent_gap:t=" + rat_string(t))};
    const double duTz = S.dist(traj.u, img);
    rc.duTz2 = duTz * duTz;
    rc.dz.resize(X.size());
    for (std::size_t n = 0; n < X.size(); ++n) rc.dz[n] = S.dist(X[n], z.z);
    res.push_back(std::move(rc));
  }

  const double duTu = S.dist(traj.u, traj.T(traj.u));
  double prev_dTu = 0;  // d(u, T x_{n-1})
  for (long n = 0; n <= H; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    Point img = traj.T(X[i]);
    const double dTu = S.dist(img, traj.u);
    // d(T x_n, u) <= d(u, Tu) + d(x_n, u)
    map_anchor.observe_slack(duTu + traj.to_anchor[i] - dTu, n);
    if (n < H) {
      const double lam = traj.lambda[i + 1];
      // x_{n+1} = lambda_{n+1} u (+) (1-lambda_{n+1}) T x_n
      near_side.observe_equality(S.dist(X[i + 1], img), lam * dTu, n);
      far_side.observe_equality(traj.to_anchor[i + 1], (1.0 - lam) * dTu, n);
      // d(x_n, T x_n) <= d(x_{n+1}, x_n) + lambda_{n+1} d(T x_n, u)
      asreg_step.observe_slack(traj.step[i] + lam * dTu - traj.asreg[i], n);
      asreg_step_M.observe_slack(traj.step[i] + 2.0 * M * lam - traj.asreg[i],
                                 n);
      // d(x_{n+1}, u) <= (1-lambda_{n+1})(d(u,Tu) + d(x_n,u))
      anchor_contr.observe_slack(
          (1.0 - lam) * (duTu + traj.to_anchor[i]) - traj.to_anchor[i + 1], n);
      // d(x_{n+1}, x_n) <= lambda_{n+1} d(x_n,u) + (1-lambda_{n+1}) d(Tx_n,x_n)
      step_split.observe_slack(
          lam * traj.to_anchor[i] + (1.0 - lam) * traj.asreg[i] - traj.step[i],
          n);
      if (n >= 1) {
        const double dl = std::abs(lam - traj.lambda[i]);
        // d(x_{n+1}, x_n) <= (1-l_{n+1}) d(x_n, x_{n-1}) + |l_{n+1}-l_n| *
        // d(u, T x_{n-1})
        step_rec.observe_slack(
            (1.0 - lam) * traj.step[i - 1] + dl * prev_dTu - traj.step[i], n);
        step_rec_M.observe_slack(
            (1.0 - lam) * traj.step[i - 1] + 2.0 * M * dl - traj.step[i], n);
      }
      for (ResolventCheck& rc : res) {
        const double da1 = traj.to_anchor[i + 1];
        rc.descent.observe_slack(
            (1.0 - lam) * rc.dz[i] * rc.dz[i] +
                lam * ((1.0 - rc.t) * rc.duTz2 - da1 * da1) + M * M * rc.t -
                rc.dz[i + 1] * rc.dz[i + 1],
            n);
        if (n >= 1) {
          // y_n := x_{n+1}; a_n = d^2(y_n,Ty_n) + 2 M d(y_n,Ty_n)
          const double dy = traj.asreg[i + 1];
          const double a_n = dy * dy + 2.0 * M * dy;
          rc.gap.observe_slack(da1 * da1 + a_n / rc.t -
                                   (1.0 - rc.t) * rc.duTz2 -
                                   rc.dz[i + 1] * rc.dz[i + 1],
                               n);
        }
      }
    }
    prev_dTu = dTu;
  }

  SlackReport report;
  report.entries.push_back(near_side.finish(tol));
  report.entries.push_back(far_side.finish(tol));
  report.entries.push_back(map_anchor.finish(tol));
  report.entries.push_back(asreg_step.finish(tol));
  report.entries.push_back(anchor_contr.finish(tol));
  report.entries.push_back(step_split.finish(tol));
  report.entries.push_back(step_rec.finish(tol));
  report.entries.push_back(asreg_step_M.finish(tol));
  report.entries.push_back(step_rec_M.finish(tol));
  for (ResolventCheck& rc : res) {
    report.entries.push_back(rc.descent.finish(tol));
    report.entries.push_back(rc.gap.finish(tol));
  }
  report.min_slack = std::numeric_limits<double>::infinity();
  report.pass = true;
  for (const SlackEntry& e : report.entries) {
    report.min_slack = std::min(report.min_slack, e.slack);
    report.pass = report.pass && e.pass;
  }
  return report;
}

std::optional<long> first_index_satisfying(const Trajectory& traj,
                                           TrajPredicate predicate,
                                           double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const std::vector<double>& v =
      predicate == TrajPredicate::asreg ? traj.asreg : traj.step;
  if (v.empty()) return std::nullopt;
  long idx = static_cast<long>(v.size());
  for (long n = static_cast<long>(v.size()) - 1; n >= 0; --n) {
    if (v[static_cast<std::size_t>(n)] <= eps)
      idx = n;
    else
      break;
  }
  if (idx == static_cast<long>(v.size())) return std::nullopt;
  return idx;
}

namespace {

long window_end(long N, const Counterexample& g, long data_size,
                const char* what) {
  const Int gN = g(Int(N));
  const Int hi = Int(N) + gN;
  if (hi >= data_size)
    throw std::invalid_argument(
        std::string("metastable window search: window [") + std::to_string(N) +
        ", " + int_string(hi) + "] reaches past the available " + what +
        "; result inconclusive");
  return hi.convert_to<long>();
}

}  // namespace

std::optional<long> find_metastable_window(const std::vector<double>& seq,
                                           double eps, const Counterexample& g,
                                           long N_max) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (N_max < 0) throw std::invalid_argument("N_max must be >= 0");
  for (long N = 0; N <= N_max; ++N) {
    const long hi = window_end(N, g, static_cast<long>(seq.size()), "data");
    double lo = seq[static_cast<std::size_t>(N)];
    double hi_v = lo;
    for (long i = N; i <= hi; ++i) {
      const double v = seq[static_cast<std::size_t>(i)];
      lo = std::min(lo, v);
      hi_v = std::max(hi_v, v);
    }
    if (hi_v - lo <= eps) return N;
  }
  return std::nullopt;
}

std::optional<long> find_metastable_window(const Trajectory& traj, double eps,
                                           const Counterexample& g,
                                           long N_max) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (N_max < 0) throw std::invalid_argument("N_max must be >= 0");
  if (!traj.stored_points)
    throw std::invalid_argument(
        "metastable window search over points requires stored points");
  const GeodesicSpace& S = *traj.space;
  for (long N = 0; N <= N_max; ++N) {
    const long hi =
        window_end(N, g, static_cast<long>(traj.points.size()), "orbit");
    bool ok = true;
    for (long a = N; a <= hi && ok; ++a)
      for (long b = a + 1; b <= hi && ok; ++b)
        ok = S.dist(traj.points[static_cast<std::size_t>(a)],
                    traj.points[static_cast<std::size_t>(b)]) <= eps;
    if (ok) return N;
  }
  return std::nullopt;
}

}  // namespace hiter
