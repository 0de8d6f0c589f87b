#pragma once
// Experiment orchestration: build spaces, maps and schedules from a flat
// key=value config, run trajectories and resolvent families, compute the a
// priori bounds, verify each soundness contract, and assemble report rows.
//
// Bounds are computed from (eps, g, M, schedule) alone and empirical indices
// from the trajectory alone; the two sides meet only in the final comparison.

#include "hiter/halpern.hpp"
#include "hiter/rates.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hiter {

enum class CheckKind { axioms, asreg, meta, resolvent, inequalities };

std::string check_kind_name(CheckKind kind);
CheckKind parse_check_kind(const std::string& name);

// One experiment cell: a space / map / schedule triple plus the grid of eps
// values, counterexample functions and checks to run on it.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string space = "euclidean:ball:2:1";
  std::string map = "identity";
  std::string schedule = "harmonic";
  // Point descriptors: random | center | coords:A,B,... | edge:ID:OFFSET.
  // Random points are drawn from the spec seed (anchor first, then start).
  std::string anchor = "random";
  std::string start = "random";
  // Bound route: auto | harmonic | div | prod. auto picks the harmonic
  // closed forms when the schedule is harmonic and eps < 1, otherwise the
  // product route when the schedule carries one, otherwise divergence.
  std::string route = "auto";
  std::vector<Rat> eps_list = {Rat(1, 2)};
  std::vector<std::string> g_list = {"g:const:0"};
  std::vector<Rat> t_list;  // resolvent parameters for inequality rows
  long horizon = 10'000;
  long window = 1'000;  // indices past the bound a pass must still cover
  int samples = 10'000;  // axiom sampling
  long resolvent_points = 65;  // family size for the resolvent check
  std::uint64_t seed = 1;
  std::vector<CheckKind> checks = {CheckKind::asreg};
  MetaBudget budget;
};

// Config grammar: '#' starts a comment; blank lines are skipped; a line
// `[experiment]` starts a new spec; `key = value` sets a field. Keys before
// the first header set file-level defaults inherited by every spec (a file
// with no header is a single spec). List values (eps, g, t, checks) are
// semicolon-separated. Keys: name, space, map, schedule, anchor, start,
// route, eps, g, t, horizon, window, samples, resolvent_points, seed, checks,
// max_steps, max_value_bits, max_enum, max_rows. Unknown keys are an error.
std::vector<ExperimentSpec> parse_experiment_specs(const std::string& text);
std::vector<ExperimentSpec> load_experiment_specs(const std::string& path);

// One verified contract. Numeric fields are exact decimal strings; empty
// means not applicable to this check. status is pass | fail | inconclusive;
// pass always certifies empirical <= bound, inconclusive is never silent
// (the witness says what was missing).
struct CheckRow {
  std::string check;
  std::string space;
  std::string map;
  std::string schedule;
  std::string eps;
  std::string g;
  std::string bound;
  std::string empirical;
  std::string status;
  double seconds = 0;
  std::uint64_t seed = 0;
  std::string witness;  // reproduction hint: index, axiom name, budget note
};

struct BoundReport {
  std::vector<CheckRow> rows;
  bool all_pass = true;  // no row failed or was inconclusive
};

// Runs every requested check; each produces exactly one row (asreg produces
// one row per bound: residual and step). Deterministic given the seed.
BoundReport run_experiment(const ExperimentSpec& spec);

// Concatenates per-spec reports in spec order.
BoundReport run_experiments(const std::vector<ExperimentSpec>& specs);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(const std::string& name);

// CSV columns: check,space,map,schedule,eps,g,bound,empirical,status,seconds,
// seed. JSON mirrors the columns (bounds stay exact decimal strings) and adds
// the witness. Output is byte-stable for a fixed report; seconds render as
// 0.000 unless include_timings is set, so fixed-seed runs stay byte-identical.
std::string render_report(const BoundReport& report, ReportFormat format,
                          bool include_timings = false);
void write_report(const BoundReport& report, ReportFormat format,
                  const std::string& path, bool include_timings = false);

// Inverse of render_report(report, json): rebuilds the report, recomputing
// all_pass from the rows.
BoundReport parse_report_json(const std::string& text);

}  // namespace hiter
