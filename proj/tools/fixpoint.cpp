#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"

namespace {

using nlohmann::json;

void emit_error(bool json_out, const char* kind, const std::string& message) {
  if (json_out) {
    json j;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

// validation -> 1; everything else -> 2, except that probe treats bad
// arguments (invalid space parameters) as validation failures.
int guarded(bool json_out, bool argument_is_validation, const std::function<int()>& body) {
  try {
    return body();
  } catch (const fixpoint::validation_error& e) {
    emit_error(json_out, "validation", e.what());
    return 1;
  } catch (const fixpoint::divergence_error& e) {
    emit_error(json_out, "divergence", e.what());
    return 2;
  } catch (const fixpoint::config_error& e) {
    emit_error(json_out, "config", e.what());
    return 2;
  } catch (const fixpoint::oracle_error& e) {
    emit_error(json_out, "oracle", e.what());
    return 2;
  } catch (const fixpoint::argument_error& e) {
    emit_error(json_out, "argument", e.what());
    return argument_is_validation ? 1 : 2;
  } catch (const std::exception& e) {
    emit_error(json_out, "internal", e.what());
    return 2;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fixpoint::config_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t probe_seed() {
  const char* env = std::getenv("FIXPOINT_SEED");
  if (!env) return 1;
  std::uint64_t seed = 0;
  const std::string_view sv(env);
  const auto res = std::from_chars(env, env + sv.size(), seed);
  if (res.ec != std::errc{} || res.ptr != env + sv.size())
    throw fixpoint::config_error("FIXPOINT_SEED must be an unsigned integer");
  return seed;
}

json report_to_json(const fixpoint::ConditionReport& report) {
  json conditions = json::array();
  for (const auto& entry : report.entries) {
    json e;
    e["name"] = entry.name;
    e["verdict"] = fixpoint::verdict_name(entry.verdict);
    e["note"] = entry.note;
    conditions.push_back(std::move(e));
  }
  json j;
  j["conditions"] = std::move(conditions);
  j["all_hold"] = report.all_hold();
  return j;
}

void print_report_table(const fixpoint::ConditionReport& report) {
  for (const auto& entry : report.entries) {
    std::printf("%-8s %-14s %s\n", entry.name.c_str(), fixpoint::verdict_name(entry.verdict),
                entry.note.c_str());
  }
  std::printf("%s\n", report.all_hold() ? "all conditions hold" : "validation failed");
}

fixpoint::ConditionReport report_for(const std::string& conditions,
                                     const fixpoint::ScheduleBundle& bundle) {
  if (conditions == "halpern") return fixpoint::validate_halpern(bundle.phi);
  if (conditions == "theorem")
    return fixpoint::validate_theorem_conditions(bundle.xi, bundle.zeta, bundle.weights);
  if (conditions == "dk") return fixpoint::validate_dk(bundle.wp, bundle.xi, bundle.zeta);
  if (conditions == "corollary")
    return fixpoint::validate_corollary(bundle.xi, bundle.zeta, bundle.phi);
  throw fixpoint::config_error("unknown condition set '" + conditions + "'");
}

std::string conditions_for_scheme(const std::string& scheme) {
  if (scheme == "itnew" || scheme == "res") return "theorem";
  return scheme;  // halpern, dk, corollary name their own sets
}

int cmd_run(const std::string& config_path, std::optional<std::size_t> max_iters,
            std::optional<double> tol, std::optional<std::string> out, bool force) {
  fixpoint::ExperimentConfig config = fixpoint::load_config(config_path);
  if (max_iters) config.stop.max_iters = *max_iters;
  if (tol) {
    // with a resolvable target the tolerance means distance, else residual
    if (config.problem.oracle != fixpoint::OracleMode::None)
      config.stop.target_tol = *tol;
    else
      config.stop.residual_tol = *tol;
  }
  if (out) config.out_prefix = *out;
  if (force) {
    config.force = true;
    std::cerr << "WARNING: --force set: precondition failures will not block execution; "
                 "convergence guarantees are void\n";
  }
  const fixpoint::RunResult result = fixpoint::run_experiment(config);
  std::cout << fixpoint::summary_to_json(result.summary);
  return 0;
}

int cmd_validate(const std::string& input_path, const std::string& conditions_flag,
                 bool json_out) {
  const std::string text = read_file(input_path);
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw fixpoint::config_error(std::string("parse: ") + e.what());
  }

  fixpoint::ConditionReport report;
  if (parsed.is_object() && parsed.contains("form")) {
    // bare schedule: bind it to the leading sequence of the requested set
    const std::string conditions = conditions_flag.empty() ? "halpern" : conditions_flag;
    const fixpoint::ScheduleSpec s = fixpoint::schedule_from_json(text);
    fixpoint::ScheduleBundle bundle;
    if (conditions == "halpern") {
      bundle.phi = s;
    } else if (conditions == "theorem") {
      bundle.xi = s;
      bundle.zeta = fixpoint::ScheduleSpec::constant(0.5);
      bundle.weights = fixpoint::FamilyWeights::uniform(1, 0.5);
    } else if (conditions == "dk") {
      bundle.wp = s;
      bundle.xi = fixpoint::ScheduleSpec::constant(0.0);
      bundle.zeta = fixpoint::ScheduleSpec::constant(0.5);
    } else {
      throw fixpoint::config_error("unknown condition set '" + conditions + "'");
    }
    report = report_for(conditions, bundle);
  } else {
    const fixpoint::ExperimentConfig config = fixpoint::config_from_json(text);
    if (config.schemes.empty() && conditions_flag.empty())
      throw fixpoint::config_error("config names no scheme; pass --conditions");
    const std::string conditions = conditions_flag.empty()
                                       ? conditions_for_scheme(config.schemes[0].scheme)
                                       : conditions_flag;
    const fixpoint::ScheduleBundle bundle =
        config.schemes.empty() ? fixpoint::ScheduleBundle{} : config.schemes[0].schedules;
    report = report_for(conditions, bundle);
  }

  if (json_out)
    std::cout << report_to_json(report).dump(2) << "\n";
  else
    print_report_table(report);
  return report.all_hold() ? 0 : 1;
}

int cmd_compare(const std::string& config_path, std::optional<std::string> out, bool force,
                bool json_out) {
  fixpoint::ExperimentConfig config = fixpoint::load_config(config_path);
  if (out) config.out_prefix = *out;
  if (force) {
    config.force = true;
    std::cerr << "WARNING: --force set: precondition failures will not block execution; "
                 "convergence guarantees are void\n";
  }
  const std::vector<fixpoint::CompareRow> rows = fixpoint::compare(config);
  if (json_out) {
    json arr = json::array();
    for (const auto& row : rows) {
      json r;
      r["scheme"] = row.scheme;
      r["outcome"] = row.summary.outcome;
      r["iterations"] = row.summary.iterations;
      r["final_residual"] = row.summary.final_residual;
      if (row.summary.final_dist_to_target)
        r["final_dist_to_target"] = *row.summary.final_dist_to_target;
      else
        r["final_dist_to_target"] = nullptr;
      r["wall_time_ms"] = row.summary.wall_time_ms;
      arr.push_back(std::move(r));
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    std::printf("%-10s %-20s %12s %16s %16s %14s\n", "scheme", "outcome", "iterations",
                "final_residual", "dist_to_target", "wall_time_ms");
    for (const auto& row : rows) {
      char dist[32] = "-";
      if (row.summary.final_dist_to_target)
        std::snprintf(dist, sizeof(dist), "%.6g", *row.summary.final_dist_to_target);
      std::printf("%-10s %-20s %12zu %16.6g %16s %14.3f\n", row.scheme.c_str(),
                  row.summary.outcome.c_str(), row.summary.iterations,
                  row.summary.final_residual, dist, row.summary.wall_time_ms);
    }
  }
  return 0;
}

int cmd_probe(const std::string& space_arg, std::size_t dim, double eps, std::size_t samples) {
  fixpoint::SpaceSpec space = fixpoint::SpaceSpec::euclidean(1);
  if (space_arg == "euclid") {
    space = fixpoint::SpaceSpec::euclidean(dim);
  } else if (space_arg.rfind("lp:", 0) == 0) {
    const std::string ptext = space_arg.substr(3);
    double p = 0.0;
    const auto res = std::from_chars(ptext.data(), ptext.data() + ptext.size(), p);
    if (res.ec != std::errc{} || res.ptr != ptext.data() + ptext.size())
      throw fixpoint::argument_error("malformed lp space '" + space_arg + "'");
    space = fixpoint::SpaceSpec::lp(p, dim);
  } else {
    throw fixpoint::argument_error("unknown space '" + space_arg + "'; use euclid or lp:P");
  }

  const std::uint64_t seed = probe_seed();
  const double delta = fixpoint::convexity_modulus_estimate(space, eps, samples, seed);
  const double rho = fixpoint::smoothness_modulus_estimate(space, eps, samples, seed + 1);

  json j;
  j["space"] = space_arg;
  j["dim"] = dim;
  j["eps"] = eps;
  j["samples"] = samples;
  j["delta"] = delta;
  j["rho"] = rho;
  j["seed"] = seed;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_list(bool json_out) {
  const std::vector<std::string> maps = {"affine", "averaged",  "ball",     "box",
                                         "composition", "halfspace", "rotation", "subgradient"};
  const std::vector<std::string> operators = {"indicator", "l1", "linear_psd", "quadratic"};
  const std::vector<std::string> schedules = {"const", "power", "table"};
  const std::vector<std::string> schemes = {"corollary", "dk", "halpern", "itnew", "res"};
  if (json_out) {
    json j;
    j["maps"] = maps;
    j["operators"] = operators;
    j["schedules"] = schedules;
    j["schemes"] = schemes;
    std::cout << j.dump(2) << "\n";
  } else {
    const auto section = [](const char* title, const std::vector<std::string>& items) {
      std::printf("%s:\n", title);
      for (const auto& item : items) std::printf("  %s\n", item.c_str());
    };
    section("maps", maps);
    section("operators", operators);
    section("schedules", schedules);
    section("schemes", schemes);
  }
  return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& out_path, bool json_out) {
  fixpoint::emit_plot(trace_path, out_path);
  if (json_out) {
    json j;
    j["out"] = out_path;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anchored fixed-point iteration laboratory"};
  app.require_subcommand(1);

  std::string run_config;
  std::size_t run_max_iters = 0;
  double run_tol = 0.0;
  std::string run_out;
  bool run_force = false, run_json = false;
  CLI::App* run = app.add_subcommand("run", "execute one scheme from a config file");
  run->add_option("config", run_config, "experiment config path")->required();
  run->add_option("--max-iters", run_max_iters, "override stop.max_iters");
  run->add_option("--tol", run_tol,
                  "override the stopping tolerance (target distance when a target resolves, "
                  "residual otherwise)");
  run->add_option("--out", run_out, "output prefix for trace/summary files");
  run->add_flag("--force", run_force, "run even when scheme preconditions fail");
  run->add_flag("--json", run_json, "JSON error objects on stdout");

  std::string validate_input, validate_conditions;
  bool validate_json = false;
  CLI::App* validate =
      app.add_subcommand("validate", "check schedule conditions for a schedule or config");
  validate->add_option("input", validate_input, "schedule JSON or config path")->required();
  validate->add_option("--conditions", validate_conditions, "condition set")
      ->check(CLI::IsMember({"halpern", "theorem", "dk"}));
  validate->add_flag("--json", validate_json, "JSON verdicts on stdout");

  std::string compare_config, compare_out;
  bool compare_force = false, compare_json = false;
  CLI::App* comp = app.add_subcommand("compare", "run every scheme in the config on one problem");
  comp->add_option("config", compare_config, "experiment config path with a scheme list")
      ->required();
  comp->add_option("--out", compare_out, "output prefix for the comparison CSV");
  comp->add_flag("--force", compare_force, "run even when scheme preconditions fail");
  comp->add_flag("--json", compare_json, "JSON rows on stdout");

  std::string plot_trace, plot_out;
  bool plot_json = false;
  CLI::App* plot = app.add_subcommand("plot", "render a trace CSV to an SVG");
  plot->add_option("trace", plot_trace, "trace CSV path")->required();
  plot->add_option("out", plot_out, "output SVG path")->required();
  plot->add_flag("--json", plot_json, "JSON result object on stdout");

  bool list_json = false;
  CLI::App* list = app.add_subcommand("list", "print the catalogue");
  list->add_flag("--json", list_json, "JSON catalogue on stdout");

  std::string probe_space = "euclid";
  std::size_t probe_dim = 2, probe_samples = 100000;
  double probe_eps = 1.0;
  CLI::App* probe = app.add_subcommand("probe", "estimate space moduli by sampling");
  probe->add_option("--space", probe_space, "euclid or lp:P");
  probe->add_option("--dim", probe_dim, "dimension");
  probe->add_option("--eps", probe_eps, "modulus argument");
  probe->add_option("--samples", probe_samples, "sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run)
    return guarded(run_json, false, [&] {
      return cmd_run(run_config,
                     run->count("--max-iters") ? std::optional<std::size_t>(run_max_iters)
                                               : std::nullopt,
                     run->count("--tol") ? std::optional<double>(run_tol) : std::nullopt,
                     run->count("--out") ? std::optional<std::string>(run_out) : std::nullopt,
                     run_force);
    });
  if (*validate)
    return guarded(validate_json, false,
                   [&] { return cmd_validate(validate_input, validate_conditions, validate_json); });
  if (*comp)
    return guarded(compare_json, false, [&] {
      return cmd_compare(compare_config,
                         comp->count("--out") ? std::optional<std::string>(compare_out)
                                              : std::nullopt,
                         compare_force, compare_json);
    });
  if (*plot)
    return guarded(plot_json, false, [&] { return cmd_plot(plot_trace, plot_out, plot_json); });
  if (*list) return guarded(list_json, false, [&] { return cmd_list(list_json); });
  if (*probe)
    return guarded(true, true,
                   [&] { return cmd_probe(probe_space, probe_dim, probe_eps, probe_samples); });
  return 2;
}
