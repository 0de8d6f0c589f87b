#include "hiter/harness.hpp"

#include "hiter/util/rng.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace hiter {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long parse_long_value(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long r = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("experiment config: key '" + key +
                                "' needs an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64_value(const std::string& value,
                              const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long r = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("experiment config: key '" + key +
                                "' needs an unsigned integer, got '" + value +
                                "'");
  }
}

std::vector<Rat> parse_rat_list(const std::string& value,
                                const std::string& key) {
  std::vector<Rat> out;
  for (const std::string& tok : split_list(value))
    out.push_back(parse_rational(tok));
  if (out.empty())
    throw std::invalid_argument("experiment config: key '" + key +
                                "' has an empty list");
  return out;
}

void apply_key(ExperimentSpec& spec, const std::string& key,
               const std::string& value) {
  if (key == "name") {
    spec.name = value;
  } else if (key == "space") {
    spec.space = value;
  } else if (key == "map") {
    spec.map = value;
  } else if (key == "schedule") {
    spec.schedule = value;
  } else if (key == "anchor") {
    spec.anchor = value;
  } else if (key == "start") {
    spec.start = value;
  } else if (key == "route") {
    spec.route = value;
  } else if (key == "eps") {
    spec.eps_list = parse_rat_list(value, key);
  } else if (key == "t") {
    spec.t_list = parse_rat_list(value, key);
  } else if (key == "g") {
    spec.g_list = split_list(value);
    if (spec.g_list.empty())
      throw std::invalid_argument("experiment config: empty g list");
  } else if (key == "checks") {
    spec.checks.clear();
    for (const std::string& tok : split_list(value))
      spec.checks.push_back(parse_check_kind(tok));
    if (spec.checks.empty())
      throw std::invalid_argument("experiment config: empty checks list");
  } else if (key == "horizon") {
    spec.horizon = parse_long_value(value, key);
  } else if (key == "window") {
    spec.window = parse_long_value(value, key);
  } else if (key == "samples") {
    spec.samples = static_cast<int>(parse_long_value(value, key));
  } else if (key == "resolvent_points") {
    spec.resolvent_points = parse_long_value(value, key);
  } else if (key == "seed") {
    spec.seed = parse_u64_value(value, key);
  } else if (key == "max_steps") {
    spec.budget.max_steps = parse_long_value(value, key);
  } else if (key == "max_value_bits") {
    spec.budget.max_value_bits = parse_long_value(value, key);
  } else if (key == "max_enum") {
    spec.budget.max_enum = parse_long_value(value, key);
  } else if (key == "max_rows") {
    spec.budget.max_rows = parse_long_value(value, key);
  } else {
    throw std::invalid_argument("experiment config: unknown key '" + key +
                                "'");
  }
}

Point make_point(const GeodesicSpace& space, const std::string& descriptor,
                 Rng& rng) {
  if (descriptor == "random") return space.random_point(rng);
  if (descriptor == "center") return space.center();
  if (descriptor.rfind("coords:", 0) == 0) {
    Point p;
    std::stringstream ss(descriptor.substr(7));
    std::string tok;
    while (std::getline(ss, tok, ','))
      p.x.push_back(std::stod(trim(tok)));
    if (!space.contains(p))
      throw std::invalid_argument("point '" + descriptor +
                                  "' lies outside " + space.descriptor());
    return p;
  }
  if (descriptor.rfind("edge:", 0) == 0) {
    const std::string rest = descriptor.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("point descriptor '" + descriptor +
                                  "' needs edge:ID:OFFSET");
    Point p;
    p.edge = std::stoi(rest.substr(0, colon));
    p.offset = std::stod(rest.substr(colon + 1));
    if (!space.contains(p))
      throw std::invalid_argument("point '" + descriptor +
                                  "' lies outside " + space.descriptor());
    return p;
  }
  throw std::invalid_argument("unknown point descriptor '" + descriptor +
                              "' (random | center | coords:... | edge:E:OFF)");
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ =
      std::chrono::steady_clock::now();
};

std::string double_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string effective_route(const ExperimentSpec& spec,
                            const ScalarSchedule& schedule, const Rat& eps) {
  if (spec.route != "auto") return spec.route;
  if (schedule.name == "harmonic" && eps < 1) return "harmonic";
  if (schedule.theta_prod) return "prod";
  return "div";
}

RegularityRates asreg_bounds_for(const std::string& route, const Rat& eps,
                                 const Int& M,
                                 const ScalarSchedule& schedule) {
  if (route == "harmonic") {
    if (schedule.name != "harmonic")
      throw std::invalid_argument(
          "route 'harmonic' needs the harmonic schedule, got '" +
          schedule.name + "'");
    return asreg_rate_harmonic(eps, M);
  }
  if (route == "prod") return asreg_rate_prod(eps, M, schedule);
  if (route == "div") return asreg_rate_div(eps, M, schedule);
  throw std::invalid_argument("unknown route '" + route +
                              "' (auto | harmonic | div | prod)");
}

MetastabilityBound meta_bound_for(const std::string& route, const Rat& eps,
                                  const Counterexample& g, const Int& M,
                                  const ScalarSchedule& schedule,
                                  const MetaBudget& budget) {
  if (route == "harmonic") {
    if (schedule.name != "harmonic")
      throw std::invalid_argument(
          "route 'harmonic' needs the harmonic schedule, got '" +
          schedule.name + "'");
    return meta_harmonic(eps, g, M, budget);
  }
  if (route == "prod") return meta_prod(eps, g, M, schedule, budget);
  if (route == "div") return meta_div(eps, g, M, schedule, budget);
  throw std::invalid_argument("unknown route '" + route +
                              "' (auto | harmonic | div | prod)");
}

}  // namespace

std::string check_kind_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::axioms: return "axioms";
    case CheckKind::asreg: return "asreg";
    case CheckKind::meta: return "meta";
    case CheckKind::resolvent: return "resolvent";
    case CheckKind::inequalities: return "inequalities";
  }
  throw std::invalid_argument("check_kind_name: bad enum value");
}

CheckKind parse_check_kind(const std::string& name) {
  if (name == "axioms") return CheckKind::axioms;
  if (name == "asreg") return CheckKind::asreg;
  if (name == "meta") return CheckKind::meta;
  if (name == "resolvent") return CheckKind::resolvent;
  if (name == "inequalities") return CheckKind::inequalities;
  throw std::invalid_argument(
      "unknown check '" + name +
      "' (axioms | asreg | meta | resolvent | inequalities)");
}

std::vector<ExperimentSpec> parse_experiment_specs(const std::string& text) {
  ExperimentSpec base;
  std::vector<ExperimentSpec> specs;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("unterminated section header");
        const std::string header = trim(line.substr(1, line.size() - 2));
        if (header != "experiment")
          throw std::invalid_argument("unknown section '" + header +
                                      "' (only [experiment])");
        specs.push_back(base);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      apply_key(specs.empty() ? base : specs.back(), key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " (line " +
                                  std::to_string(line_no) + ")");
    }
  }
  if (specs.empty()) specs.push_back(base);  // header-less file = one spec
  return specs;
}

std::vector<ExperimentSpec> load_experiment_specs(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot open experiment spec '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_experiment_specs(buf.str());
}

BoundReport run_experiment(const ExperimentSpec& spec) {
  BoundReport report;
  const SpacePtr space = make_space(spec.space);
  const Int M(space->diameter_bound());
  const NonexpansiveMap T = make_map(space, spec.map);
  const ScalarSchedule schedule = make_schedule(spec.schedule);
  if (spec.horizon < 1)
    throw std::invalid_argument("experiment config: horizon must be >= 1");
  if (spec.resolvent_points < 1)
    throw std::invalid_argument(
        "experiment config: resolvent_points must be >= 1");
  Rng rng(spec.seed);
  const Point u = make_point(*space, spec.anchor, rng);
  const Point x0 = make_point(*space, spec.start, rng);

  // Shared by asreg / meta / inequalities; built on first use so pure bound
  // computations never touch the dynamics.
  std::optional<Trajectory> cached;
  const auto trajectory = [&]() -> const Trajectory& {
    if (!cached) {
      HalpernConfig cfg;
      cfg.space = space;
      cfg.T = T;
      cfg.u = u;
      cfg.x = x0;
      cfg.schedule = schedule;
      cfg.horizon = spec.horizon;
      cfg.store_points = true;
      cached = halpern_run(cfg);
    }
    return *cached;
  };

  CheckRow proto;
  proto.space = spec.space;
  proto.map = spec.map;
  proto.schedule = spec.schedule;
  proto.seed = spec.seed;

  const auto run_asreg_row = [&](const char* name, TrajPredicate predicate,
                                 const Rat& eps, const Int& bound,
                                 long last_index) {
    CheckRow row = proto;
    row.check = name;
    row.eps = rat_string(eps);
    row.bound = int_string(bound);
    Stopwatch sw;
    if (bound + spec.window > last_index) {
      row.status = "inconclusive";
      row.witness = "horizon " + std::to_string(spec.horizon) +
                    " cannot cover bound+window " +
                    int_string(bound + spec.window);
    } else {
      const std::optional<long> idx =
          first_index_satisfying(trajectory(), predicate, rat_double(eps));
      if (idx) row.empirical = std::to_string(*idx);
      if (idx && Int(*idx) <= bound) {
        row.status = "pass";
      } else if (idx) {
        row.status = "fail";
        row.witness = "first stable index exceeds the bound";
      } else {
        row.status = "fail";
        row.witness = "no index stays within eps through the horizon";
      }
    }
    row.seconds = sw.seconds();
    report.rows.push_back(row);
  };

  for (const CheckKind kind : spec.checks) {
    switch (kind) {
      case CheckKind::axioms: {
        CheckRow row = proto;
        row.check = "axioms";
        Stopwatch sw;
        const AxiomReport ax = check_w_axioms(*space, spec.samples, spec.seed);
        row.status = ax.pass ? "pass" : "fail";
        for (const AxiomCheck& c : ax.checks)
          if (!c.pass) {
            row.witness = c.name + " violated by " +
                          double_string(c.max_violation);
            break;
          }
        row.seconds = sw.seconds();
        report.rows.push_back(row);
        break;
      }
      case CheckKind::asreg: {
        for (const Rat& eps : spec.eps_list) {
          const std::string route = effective_route(spec, schedule, eps);
          const RegularityRates rates =
              asreg_bounds_for(route, eps, M, schedule);
          run_asreg_row("asreg", TrajPredicate::asreg, eps, rates.phi,
                        spec.horizon);
          run_asreg_row("asreg_step", TrajPredicate::step, eps,
                        rates.phi_tilde, spec.horizon - 1);
        }
        break;
      }
      case CheckKind::meta: {
        for (const Rat& eps : spec.eps_list) {
          for (const std::string& g_desc : spec.g_list) {
            CheckRow row = proto;
            row.check = "meta";
            row.eps = rat_string(eps);
            row.g = g_desc;
            Stopwatch sw;
            const Counterexample g = parse_counterexample(g_desc);
            const std::string route = effective_route(spec, schedule, eps);
            const MetastabilityBound bound =
                meta_bound_for(route, eps, g, M, schedule, spec.budget);
            row.bound = int_string(bound.sigma);
            std::optional<long> N;
            std::string search_note;
            try {
              N = find_metastable_window(trajectory(), rat_double(eps), g,
                                         spec.horizon);
            } catch (const std::invalid_argument& e) {
              search_note = e.what();
            }
            if (N) {
              row.empirical = std::to_string(*N);
              if (!bound.sigma_is_exact) {
                // budget exhaustion: sigma is only a certified lower bound,
                // so the exact-sigma contract was not met
                row.status = "inconclusive";
                row.witness =
                    std::string(meta_status_name(bound.status)) +
                    ": sigma is a certified lower bound only" +
                    (Int(*N) <= bound.sigma
                         ? "; empirical index is within the lower bound"
                         : "");
              } else if (Int(*N) <= bound.sigma) {
                row.status = "pass";
              } else {
                row.status = "fail";
                row.witness = "empirical window index exceeds sigma";
              }
            } else {
              const bool refuted = bound.sigma_is_exact &&
                                   bound.sigma <= Int(spec.horizon);
              row.status = refuted ? "fail" : "inconclusive";
              row.witness = search_note.empty()
                                ? "no metastable window found within horizon"
                                : search_note;
            }
            row.seconds = sw.seconds();
            report.rows.push_back(row);
          }
        }
        break;
      }
      case CheckKind::resolvent: {
        // z_{t_k} at t_k = 1/(k+1), residual certified <= 1e-10
        std::vector<Point> family;
        family.reserve(static_cast<std::size_t>(spec.resolvent_points));
        for (long k = 0; k < spec.resolvent_points; ++k) {
          const Rat t(Int(1), Int(k + 1));
          family.push_back(resolvent_point(*space, T, u, t, 1e-10).z);
        }
        for (const Rat& eps : spec.eps_list) {
          const double eps_d = rat_double(eps);
          for (const std::string& g_desc : spec.g_list) {
            CheckRow row = proto;
            row.check = "resolvent";
            row.eps = rat_string(eps);
            row.g = g_desc;
            Stopwatch sw;
            const Counterexample g = parse_counterexample(g_desc);
            const Int K = browder_K(eps, g, M);
            row.bound = int_string(K);
            const long size = static_cast<long>(family.size());
            const long limit =
                K < size ? K.convert_to<long>() : size - 1;
            std::optional<long> K0;
            std::optional<long> overrun_at;
            for (long N = 0; N <= limit; ++N) {
              const Int wend = Int(N) + g(Int(N));
              if (wend >= size) {
                overrun_at = N;
                break;
              }
              const long hi = wend.convert_to<long>();
              bool ok = true;
              for (long a = N; a <= hi && ok; ++a)
                for (long b = a + 1; b <= hi && ok; ++b)
                  ok = space->dist(family[static_cast<std::size_t>(a)],
                                   family[static_cast<std::size_t>(b)]) <=
                       eps_d;
              if (ok) {
                K0 = N;
                break;
              }
            }
            if (K0) {
              row.empirical = std::to_string(*K0);
              row.status = "pass";  // K0 <= limit <= K by construction
            } else if (overrun_at) {
              row.status = "inconclusive";
              row.witness = "window at K0=" + std::to_string(*overrun_at) +
                            " reaches past the computed family of " +
                            std::to_string(size) +
                            " resolvents; raise resolvent_points";
            } else if (K < size) {
              row.status = "fail";
              row.witness = "no metastable window with K0 <= K";
            } else {
              row.status = "inconclusive";
              row.witness = "family of " + std::to_string(size) +
                            " resolvents exhausted below K";
            }
            row.seconds = sw.seconds();
            report.rows.push_back(row);
          }
        }
        break;
      }
      case CheckKind::inequalities: {
        CheckRow row = proto;
        row.check = "inequalities";
        Stopwatch sw;
        const std::vector<Rat> ts =
            spec.t_list.empty()
                ? std::vector<Rat>{Rat(1, 2), Rat(1, 10), Rat(1, 100)}
                : spec.t_list;
        const SlackReport slack =
            check_trajectory_inequalities(trajectory(), ts, 1e-8);
        row.status = slack.pass ? "pass" : "fail";
        const SlackEntry* worst = nullptr;
        for (const SlackEntry& e : slack.entries)
          if (!worst || e.slack < worst->slack) worst = &e;
        if (worst)
          row.witness = worst->name + " slack " + double_string(worst->slack) +
                        " at n=" + std::to_string(worst->argmin);
        row.seconds = sw.seconds();
        report.rows.push_back(row);
        break;
      }
    }
  }

  for (const CheckRow& row : report.rows)
    if (row.status != "pass") report.all_pass = false;
  return report;
}

BoundReport run_experiments(const std::vector<ExperimentSpec>& specs) {
  BoundReport out;
  for (const ExperimentSpec& spec : specs) {
    BoundReport one = run_experiment(spec);
    out.all_pass = out.all_pass && one.all_pass;
    for (CheckRow& row : one.rows) out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace hiter
