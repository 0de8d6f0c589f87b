#include "hiter/cli.hpp"

#include "hiter/harness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace hiter {

namespace {

struct RateArgs {
  std::string schedule = "harmonic";
  std::string route = "auto";
  std::string eps = "1/2";
  long M = 1;
  std::string g = "g:const:0";
  long max_steps = 10'000'000;
  long max_bits = 1L << 16;
  long max_enum = 1L << 24;
  long max_rows = 1L << 20;
  long table_rows = 8;
};

std::string pick_route(const RateArgs& args, const ScalarSchedule& schedule,
                       const Rat& eps) {
  if (args.route != "auto") return args.route;
  if (schedule.name == "harmonic" && eps < 1) return "harmonic";
  if (schedule.theta_prod) return "prod";
  return "div";
}

int run_rates_asreg(const RateArgs& args) {
  const ScalarSchedule schedule = make_schedule(args.schedule);
  const Rat eps = parse_rational(args.eps);
  const Int M(args.M);
  const std::string route = pick_route(args, schedule, eps);
  RegularityRates rates;
  if (route == "harmonic") {
    rates = asreg_rate_harmonic(eps, M);
  } else if (route == "prod") {
    rates = asreg_rate_prod(eps, M, schedule);
  } else if (route == "div") {
    rates = asreg_rate_div(eps, M, schedule);
  } else {
    throw std::invalid_argument("unknown route '" + route +
                                "' (auto | harmonic | div | prod)");
  }
  std::cout << "route=" << rates.provenance << "\n";
  std::cout << "phi_tilde=" << int_string(rates.phi_tilde) << "\n";
  std::cout << "phi=" << int_string(rates.phi) << "\n";
  if (rates.D) std::cout << "D=" << rat_string(*rates.D) << "\n";
  return 0;
}

int run_rates_meta(const RateArgs& args) {
  const ScalarSchedule schedule = make_schedule(args.schedule);
  const Rat eps = parse_rational(args.eps);
  const Int M(args.M);
  const Counterexample g = parse_counterexample(args.g);
  MetaBudget budget;
  budget.max_steps = args.max_steps;
  budget.max_value_bits = args.max_bits;
  budget.max_enum = args.max_enum;
  budget.max_rows = args.max_rows;
  const std::string route = pick_route(args, schedule, eps);
  MetastabilityBound bound;
  if (route == "harmonic") {
    bound = meta_harmonic(eps, g, M, budget);
  } else if (route == "prod") {
    bound = meta_prod(eps, g, M, schedule, budget);
  } else if (route == "div") {
    bound = meta_div(eps, g, M, schedule, budget);
  } else {
    throw std::invalid_argument("unknown route '" + route +
                                "' (auto | harmonic | div | prod)");
  }

  std::cout << "Sigma=" << int_string(bound.sigma) << "\n";
  nlohmann::ordered_json doc;
  doc["eps0"] = rat_string(bound.eps0);
  doc["iter_count"] = int_string(bound.steps_done);
  if (bound.Gamma) {
    doc["Gamma_or_L"] = int_string(*bound.Gamma);
  } else if (bound.L) {
    doc["Gamma_or_L"] = int_string(*bound.L);
  } else {
    doc["Gamma_or_L"] = nullptr;
  }
  doc["Sigma"] = int_string(bound.sigma);
  doc["status"] = meta_status_name(bound.status);
  doc["sigma_is_exact"] = bound.sigma_is_exact;
  doc["provenance"] = bound.provenance;
  doc["ceil_inv_eps0"] = int_string(bound.ceil_inv_eps0);
  doc["J"] = int_string(bound.J);
  doc["K_end"] = int_string(bound.K_end);
  doc["enum_count"] = int_string(bound.enum_count);
  doc["detail"] = bound.detail;
  doc["rows"] = nlohmann::ordered_json::array();
  long emitted = 0;
  for (const MetaRow& row : bound.rows) {
    if (emitted >= args.table_rows) break;
    nlohmann::ordered_json j;
    j["k"] = int_string(row.k);
    j["P_tilde"] = int_string(row.P_tilde);
    j["chi"] = int_string(row.chi);
    j["Theta"] = int_string(row.Theta);
    j["Delta"] = rat_string(row.Delta);
    j["f"] = int_string(row.f);
    doc["rows"].push_back(std::move(j));
    ++emitted;
  }
  doc["rows_recorded"] = bound.rows_recorded;
  doc["rows_shown"] = emitted;
  std::cout << doc.dump(2) << "\n";
  // a partial bound is a certified lower bound, not the requested Sigma
  return bound.status == MetaStatus::complete ? 0 : 1;
}

int run_rates_browder(const RateArgs& args) {
  const Rat eps = parse_rational(args.eps);
  const Counterexample g = parse_counterexample(args.g);
  const Int K = browder_K(eps, g, Int(args.M));
  std::cout << "K=" << int_string(K) << "\n";
  return 0;
}

int run_verify_axioms(const std::string& space_desc, int samples,
                      std::uint64_t seed) {
  const SpacePtr space = make_space(space_desc);
  const AxiomReport report = check_w_axioms(*space, samples, seed);
  for (const AxiomCheck& c : report.checks) {
    std::cout << (c.pass ? "pass " : "FAIL ") << c.name
              << " max_violation=" << c.max_violation << "\n";
  }
  std::cout << (report.pass ? "all axioms hold" : "axiom violation") << " on "
            << report.space << " (" << report.samples << " samples, seed "
            << report.seed << ")\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Halpern iteration rate calculators and experiment harness"};
  app.require_subcommand(1);

  // rates
  RateArgs rate_args;
  CLI::App* rates = app.add_subcommand(
      "rates", "compute a named bound from moduli alone");
  rates->require_subcommand(1);
  const auto add_common = [&](CLI::App* cmd, bool wants_schedule) {
    if (wants_schedule) {
      cmd->add_option("--schedule", rate_args.schedule,
                      "schedule name (harmonic | sqrt)");
      cmd->add_option("--route", rate_args.route,
                      "bound route (auto | harmonic | div | prod)");
    }
    cmd->add_option("--eps", rate_args.eps, "precision, exact rational")
        ->required();
    cmd->add_option("--M", rate_args.M, "integer bound on the diameter")
        ->required();
  };
  CLI::App* rates_asreg = rates->add_subcommand(
      "asreg", "asymptotic-regularity rates phi_tilde / phi");
  add_common(rates_asreg, true);
  CLI::App* rates_meta = rates->add_subcommand(
      "meta", "metastability bound Sigma with intermediates");
  add_common(rates_meta, true);
  rates_meta->add_option("--g", rate_args.g, "counterexample descriptor");
  rates_meta->add_option("--max-steps", rate_args.max_steps,
                         "iteration budget");
  rates_meta->add_option("--max-bits", rate_args.max_bits,
                         "bit-size budget per iterate");
  rates_meta->add_option("--max-enum", rate_args.max_enum,
                         "enumeration budget for the final max");
  rates_meta->add_option("--max-rows", rate_args.max_rows,
                         "recorded tower rows");
  rates_meta->add_option("--table-rows", rate_args.table_rows,
                         "rows shown in the intermediates dump");
  CLI::App* rates_browder = rates->add_subcommand(
      "browder", "resolvent-family metastability bound K");
  add_common(rates_browder, false);
  rates_browder->add_option("--g", rate_args.g, "counterexample descriptor");

  // run
  std::string spec_path;
  std::string out_path;
  std::string format_name = "csv";
  bool timings = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment spec file");
  run->add_option("--spec", spec_path, "experiment spec file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "report file (default stdout)");
  run->add_option("--format", format_name, "report format (csv | json)");
  run->add_flag("--timings", timings,
                "emit measured seconds (breaks byte-stability)");

  // verify-axioms
  std::string space_desc;
  int samples = 10'000;
  std::uint64_t seed = 1;
  CLI::App* verify = app.add_subcommand(
      "verify-axioms", "sample the geodesic axioms on a model space");
  verify->add_option("--space", space_desc, "space descriptor")->required();
  verify->add_option("--samples", samples, "sample count");
  verify->add_option("--seed", seed, "PRNG seed");

  // report
  std::string in_path;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "re-render a JSON report as csv or json");
  report_cmd->add_option("--in", in_path, "JSON report file")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--format", format_name, "output format (csv | json)");
  report_cmd->add_option("--out", out_path, "output file (default stdout)");
  report_cmd->add_flag("--timings", timings, "keep recorded seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help is 0; any usage error is 2
  }

  try {
    if (rates->parsed()) {
      if (rates_asreg->parsed()) return run_rates_asreg(rate_args);
      if (rates_meta->parsed()) return run_rates_meta(rate_args);
      if (rates_browder->parsed()) return run_rates_browder(rate_args);
      return 2;
    }
    if (run->parsed()) {
      const ReportFormat format = parse_report_format(format_name);
      const std::vector<ExperimentSpec> specs =
          load_experiment_specs(spec_path);
      const BoundReport report = run_experiments(specs);
      if (out_path.empty())
        std::cout << render_report(report, format, timings);
      else
        write_report(report, format, out_path, timings);
      return report.all_pass ? 0 : 1;
    }
    if (verify->parsed())
      return run_verify_axioms(space_desc, samples, seed);
    if (report_cmd->parsed()) {
      const ReportFormat format = parse_report_format(format_name);
      std::ifstream f(in_path);
      std::stringstream buf;
      buf << f.rdbuf();
      const BoundReport report = parse_report_json(buf.str());
      if (out_path.empty())
        std::cout << render_report(report, format, timings);
      else
        write_report(report, format, out_path, timings);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed report: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // mid-run failures (I/O, residuals) are check failures
  }
  return 2;
}

}  // namespace hiter
