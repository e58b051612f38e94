#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"
#include "internal.hpp"

namespace fixpoint {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw config_error(std::string("config: missing field '") + key + "'");
  return *it;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw config_error(std::string("config: unknown field '") + key + "' in " + where);
  }
}

Point parse_point(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw config_error(std::string("config: '") + what + "' must be a nonempty number array");
  std::vector<double> coords;
  coords.reserve(j.size());
  for (const auto& cell : j) {
    if (!cell.is_number())
      throw config_error(std::string("config: '") + what + "' must contain only numbers");
    coords.push_back(cell.get<double>());
  }
  return Point(std::move(coords));
}

std::vector<Point> parse_rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw config_error(std::string("config: '") + what + "' must be a nonempty array of rows");
  std::vector<Point> rows;
  rows.reserve(j.size());
  for (const auto& row : j) rows.push_back(parse_point(row, what));
  return rows;
}

MapSpec parse_map(const json& j);

std::vector<Halfspace> parse_cuts(const json& j) {
  if (!j.is_array() || j.empty())
    throw config_error("config: 'cuts' must be a nonempty array");
  std::vector<Halfspace> cuts;
  for (const auto& cut : j) {
    reject_unknown_keys(cut, {"a", "b"}, "cut");
    cuts.push_back(Halfspace{parse_point(require(cut, "a"), "a"), require(cut, "b").get<double>()});
  }
  return cuts;
}

MapSpec parse_map(const json& j) {
  if (!j.is_object()) throw config_error("config: map entry must be an object");
  const std::string type = require(j, "type").get<std::string>();
  if (type == "halfspace") {
    reject_unknown_keys(j, {"type", "a", "b"}, "halfspace map");
    return halfspace_projection(parse_point(require(j, "a"), "a"), require(j, "b").get<double>());
  }
  if (type == "ball") {
    reject_unknown_keys(j, {"type", "center", "radius"}, "ball map");
    return ball_projection(parse_point(require(j, "center"), "center"),
                           require(j, "radius").get<double>());
  }
  if (type == "box") {
    reject_unknown_keys(j, {"type", "lo", "hi"}, "box map");
    return box_projection(parse_point(require(j, "lo"), "lo"),
                          parse_point(require(j, "hi"), "hi"));
  }
  if (type == "affine") {
    reject_unknown_keys(j, {"type", "rows", "rhs"}, "affine map");
    std::vector<double> rhs;
    for (const auto& cell : require(j, "rhs")) rhs.push_back(cell.get<double>());
    return affine_projection(parse_rows(require(j, "rows"), "rows"), std::move(rhs));
  }
  if (type == "rotation") {
    reject_unknown_keys(j, {"type", "angle"}, "rotation map");
    return plane_rotation(require(j, "angle").get<double>());
  }
  if (type == "subgradient") {
    reject_unknown_keys(j, {"type", "cuts"}, "subgradient map");
    return subgradient_projector(parse_cuts(require(j, "cuts")));
  }
  if (type == "averaged") {
    reject_unknown_keys(j, {"type", "inner", "lambda"}, "averaged map");
    return averaged_map(parse_map(require(j, "inner")), require(j, "lambda").get<double>());
  }
  if (type == "composition") {
    reject_unknown_keys(j, {"type", "stages"}, "composition map");
    std::vector<MapSpec> stages;
    for (const auto& stage : require(j, "stages")) stages.push_back(parse_map(stage));
    return composition(std::move(stages));
  }
  throw config_error("config: unknown map type '" + type + "'");
}

OperatorSpec parse_operator(const json& j) {
  if (!j.is_object()) throw config_error("config: operator entry must be an object");
  const std::string type = require(j, "type").get<std::string>();
  if (type == "quadratic") {
    reject_unknown_keys(j, {"type", "center", "scale"}, "quadratic operator");
    return quadratic_subdifferential(parse_point(require(j, "center"), "center"),
                                     require(j, "scale").get<double>());
  }
  if (type == "l1") {
    reject_unknown_keys(j, {"type", "weight"}, "l1 operator");
    return l1_subdifferential(require(j, "weight").get<double>());
  }
  if (type == "indicator") {
    reject_unknown_keys(j, {"type", "projection"}, "indicator operator");
    return indicator_subdifferential(parse_map(require(j, "projection")));
  }
  if (type == "linear_psd") {
    reject_unknown_keys(j, {"type", "rows"}, "linear_psd operator");
    return linear_psd(parse_rows(require(j, "rows"), "rows"));
  }
  throw config_error("config: unknown operator type '" + type + "'");
}

ScheduleSpec parse_schedule(const json& j, const char* what) {
  if (!j.is_object())
    throw config_error(std::string("config: schedule '") + what + "' must be an object");
  const std::string form = require(j, "form").get<std::string>();
  if (form == "power") {
    reject_unknown_keys(j, {"form", "a", "b"}, what);
    return ScheduleSpec::power(require(j, "a").get<double>(), require(j, "b").get<double>());
  }
  if (form == "const") {
    reject_unknown_keys(j, {"form", "c"}, what);
    return ScheduleSpec::constant(require(j, "c").get<double>());
  }
  if (form == "table") {
    reject_unknown_keys(j, {"form", "values", "tail"}, what);
    if (j.contains("tail") && j["tail"].get<std::string>() != "repeat_last")
      throw config_error("config: the only supported table tail is 'repeat_last'");
    std::vector<double> values;
    for (const auto& cell : require(j, "values")) values.push_back(cell.get<double>());
    return ScheduleSpec::table(std::move(values));
  }
  throw config_error("config: unknown schedule form '" + form + "'");
}

FamilyWeights parse_weights(const json& j) {
  const std::string rule = require(j, "rule").get<std::string>();
  const auto M = require(j, "M").get<std::size_t>();
  const auto phi0 = require(j, "phi0").get<double>();
  if (rule == "uniform") {
    reject_unknown_keys(j, {"rule", "M", "phi0"}, "weights");
    return FamilyWeights::uniform(M, phi0);
  }
  if (rule == "geometric") {
    reject_unknown_keys(j, {"rule", "M", "phi0", "q"}, "weights");
    return FamilyWeights::geometric(M, phi0, require(j, "q").get<double>());
  }
  throw config_error("config: unknown weights rule '" + rule + "'");
}

ResolventScaleSchedule parse_rscale(const json& j) {
  const std::string form = require(j, "form").get<std::string>();
  if (form == "const") {
    reject_unknown_keys(j, {"form", "r"}, "r schedule");
    return ResolventScaleSchedule::constant(require(j, "r").get<double>());
  }
  if (form == "convergent") {
    reject_unknown_keys(j, {"form", "r", "decay"}, "r schedule");
    return ResolventScaleSchedule::convergent(require(j, "r").get<double>(),
                                              require(j, "decay").get<double>());
  }
  throw config_error("config: unknown resolvent scale form '" + form + "'");
}

SpaceSpec parse_space(const json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  const auto dim = require(j, "dim").get<std::size_t>();
  if (kind == "euclid") {
    reject_unknown_keys(j, {"kind", "dim"}, "space");
    return SpaceSpec::euclidean(dim);
  }
  if (kind == "lp") {
    reject_unknown_keys(j, {"kind", "dim", "p"}, "space");
    return SpaceSpec::lp(require(j, "p").get<double>(), dim);
  }
  throw config_error("config: unknown space kind '" + kind + "'");
}

ProblemSpec parse_problem(const json& j) {
  reject_unknown_keys(j, {"space", "kind", "maps", "ops", "u", "v1", "witness", "oracle"},
                      "problem");
  ProblemSpec problem;
  problem.space = parse_space(require(j, "space"));
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "common_fixed_point") {
    problem.kind = ProblemKind::CommonFixedPoint;
    for (const auto& m : require(j, "maps")) problem.maps.push_back(parse_map(m));
  } else if (kind == "common_zero") {
    problem.kind = ProblemKind::CommonZero;
    for (const auto& op : require(j, "ops")) problem.ops.push_back(parse_operator(op));
  } else {
    throw config_error("config: unknown problem kind '" + kind + "'");
  }
  problem.u = parse_point(require(j, "u"), "u");
  problem.v1 = parse_point(require(j, "v1"), "v1");

  if (j.contains("oracle")) {
    const json& oracle = j["oracle"];
    if (oracle.is_string()) {
      const std::string mode = oracle.get<std::string>();
      if (mode == "computed")
        problem.oracle = OracleMode::Computed;
      else if (mode == "none")
        problem.oracle = OracleMode::None;
      else
        throw config_error("config: unknown oracle mode '" + mode + "'");
    } else if (oracle.is_object()) {
      reject_unknown_keys(oracle, {"target"}, "oracle");
      problem.oracle = OracleMode::Analytic;
      problem.analytic_target = parse_point(require(oracle, "target"), "target");
    } else {
      throw config_error("config: 'oracle' must be \"computed\", \"none\", or {\"target\": [...]}");
    }
  }

  if (j.contains("witness"))
    problem.witness = parse_point(j["witness"], "witness");
  else
    problem.witness = detail::find_witness(problem);
  return problem;
}

ScheduleBundle parse_bundle_over(const json& j, ScheduleBundle bundle) {
  reject_unknown_keys(j, {"xi", "zeta", "phi", "wp", "weights", "r", "per_scheme"}, "schedules");
  if (j.contains("xi")) bundle.xi = parse_schedule(j["xi"], "xi");
  if (j.contains("zeta")) bundle.zeta = parse_schedule(j["zeta"], "zeta");
  if (j.contains("phi")) bundle.phi = parse_schedule(j["phi"], "phi");
  if (j.contains("wp")) bundle.wp = parse_schedule(j["wp"], "wp");
  if (j.contains("weights")) bundle.weights = parse_weights(j["weights"]);
  if (j.contains("r")) bundle.r = parse_rscale(j["r"]);
  return bundle;
}

StopRule parse_stop(const json& j) {
  reject_unknown_keys(j, {"max_iters", "residual_tol", "step_tol", "target_tol"}, "stop");
  StopRule stop;
  if (j.contains("max_iters")) stop.max_iters = j["max_iters"].get<std::size_t>();
  if (j.contains("residual_tol")) stop.residual_tol = j["residual_tol"].get<double>();
  if (j.contains("step_tol")) stop.step_tol = j["step_tol"].get<double>();
  if (j.contains("target_tol")) stop.target_tol = j["target_tol"].get<double>();
  return stop;
}

bool known_scheme(const std::string& s) {
  return s == "itnew" || s == "res" || s == "corollary" || s == "halpern" || s == "dk";
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17] = {};
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return std::string("0x") + buf;
}

}  // namespace

ScheduleSpec schedule_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("schedule parse: ") + e.what());
  }
  try {
    return parse_schedule(j, "schedule");
  } catch (const json::exception& e) {
    throw config_error(std::string("schedule: ") + e.what());
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse: ") + e.what());
  }

  try {
    if (!j.is_object()) throw config_error("config: top level must be an object");
    reject_unknown_keys(j, {"problem", "scheme", "schedules", "stop", "seed", "out"}, "config");

    ExperimentConfig config;
    config.problem = parse_problem(require(j, "problem"));

    std::vector<std::string> scheme_names;
    const json& scheme = require(j, "scheme");
    if (scheme.is_string()) {
      scheme_names.push_back(scheme.get<std::string>());
    } else if (scheme.is_array()) {
      for (const auto& s : scheme) scheme_names.push_back(s.get<std::string>());
    } else {
      throw config_error("config: 'scheme' must be a string or an array of strings");
    }
    // an empty list parses; run/compare reject it as a validation failure
    for (const auto& name : scheme_names)
      if (!known_scheme(name)) throw config_error("config: unknown scheme '" + name + "'");

    ScheduleBundle base;
    {
      // default weights spread evenly over the base point and the family
      const std::size_t fam = std::max<std::size_t>(config.problem.family_size(), 1);
      base.weights = FamilyWeights::uniform(fam - 1, 1.0 / static_cast<double>(fam));
    }
    json per_scheme = json::object();
    if (j.contains("schedules")) {
      base = parse_bundle_over(j["schedules"], base);
      if (j["schedules"].contains("per_scheme")) {
        per_scheme = j["schedules"]["per_scheme"];
        if (!per_scheme.is_object())
          throw config_error("config: 'per_scheme' must be an object keyed by scheme name");
      }
    }
    for (const auto& [key, value] : per_scheme.items()) {
      (void)value;
      if (!known_scheme(key))
        throw config_error("config: per_scheme entry for unknown scheme '" + key + "'");
    }
    for (const auto& name : scheme_names) {
      SchemeConfig sc;
      sc.scheme = name;
      sc.schedules =
          per_scheme.contains(name) ? parse_bundle_over(per_scheme[name], base) : base;
      config.schemes.push_back(std::move(sc));
    }

    if (j.contains("stop")) config.stop = parse_stop(j["stop"]);
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (const char* env = std::getenv("FIXPOINT_SEED")) {
      std::uint64_t seed = 0;
      const auto res = std::from_chars(env, env + std::string_view(env).size(), seed);
      if (res.ec != std::errc{} || *res.ptr != '\0')
        throw config_error("FIXPOINT_SEED must be an unsigned integer");
      config.seed = seed;
      j["seed"] = seed;  // the digest covers the effective seed
    }
    if (j.contains("out")) config.out_prefix = j["out"].get<std::string>();

    config.digest = fnv1a64(j.dump());
    return config;
  } catch (const json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string summary_to_json(const Summary& s) {
  json j;
  j["outcome"] = s.outcome;
  j["iterations"] = s.iterations;
  j["final_residual"] = s.final_residual;
  if (s.final_dist_to_target)
    j["final_dist_to_target"] = *s.final_dist_to_target;
  else
    j["final_dist_to_target"] = nullptr;
  j["wall_time_ms"] = s.wall_time_ms;
  j["config_digest"] = hex_digest(s.config_digest);
  return j.dump(2) + "\n";
}

namespace {

void check_scheme_matches_problem(const std::string& scheme, const ProblemSpec& problem) {
  const bool needs_zero = scheme == "res";
  const bool is_zero = problem.kind == ProblemKind::CommonZero;
  if (needs_zero != is_zero)
    throw validation_error(needs_zero
                               ? "scheme 'res' requires a common_zero problem"
                               : "scheme '" + scheme + "' requires a common_fixed_point problem");
}

RunResult execute_scheme(const ProblemSpec& problem, const SchemeConfig& sc, const StopRule& stop,
                         std::uint64_t digest, const Point* target, bool force) {
  check_scheme_matches_problem(sc.scheme, problem);
  if (stop.target_tol && target == nullptr)
    throw argument_error("stop.target_tol set but the problem resolves no target");

  RunOptions opt;
  opt.target = target;
  opt.skip_validation = force;

  const ScheduleBundle& sch = sc.schedules;
  const auto t0 = std::chrono::steady_clock::now();
  Trace trace;
  if (sc.scheme == "itnew") {
    trace = run_itnew(problem.space, problem.u, problem.v1, problem.maps, sch.xi, sch.zeta,
                      sch.weights, stop, opt);
  } else if (sc.scheme == "res") {
    trace = run_resolvent_scheme(problem.space, problem.u, problem.v1, problem.ops, sch.r, sch.xi,
                                 sch.zeta, sch.weights, stop, opt);
  } else {
    if (problem.maps.size() != 1)
      throw validation_error("scheme '" + sc.scheme + "' drives exactly one map; got " +
                             std::to_string(problem.maps.size()));
    if (sc.scheme == "corollary")
      trace = run_corollary_single(problem.space, problem.u, problem.v1, problem.maps[0], sch.xi,
                                   sch.zeta, sch.phi, stop, opt);
    else if (sc.scheme == "halpern")
      trace = run_halpern(problem.space, problem.u, problem.v1, problem.maps[0], sch.phi, stop,
                          opt);
    else if (sc.scheme == "dk")
      trace = run_dk(problem.space, problem.v1, problem.maps[0], sch.wp, sch.xi, sch.zeta, stop,
                     opt);
    else
      throw config_error("config: unknown scheme '" + sc.scheme + "'");
  }
  const auto t1 = std::chrono::steady_clock::now();

  trace.config_digest = digest;
  RunResult result;
  result.summary.outcome = outcome_name(trace.outcome);
  const TraceRecord& last = trace.records.back();
  result.summary.iterations = last.n;
  double rmax = 0.0;
  for (double r : last.residuals) rmax = std::max(rmax, r);
  result.summary.final_residual = rmax;
  result.summary.final_dist_to_target = last.dist_to_target;
  result.summary.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.summary.config_digest = digest;
  result.trace = std::move(trace);
  return result;
}

// Single-map schemes run a multi-map family as the composition of its
// members; the fixed sets agree with the intersection by construction.
ProblemSpec problem_for_scheme(const ProblemSpec& problem, const std::string& scheme) {
  if (scheme == "itnew" || scheme == "res" || problem.maps.size() <= 1) return problem;
  ProblemSpec wrapped = problem;
  wrapped.maps = {composition(problem.maps)};
  return wrapped;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  if (config.schemes.size() != 1)
    throw validation_error("run drives a single scheme; use compare for several");
  config.problem.validate();
  const std::optional<Point> target = resolve_target(config.problem);
  RunResult result = execute_scheme(config.problem, config.schemes[0], config.stop, config.digest,
                                    target ? &*target : nullptr, config.force);
  if (!config.out_prefix.empty()) {
    write_trace_csv(result.trace, config.out_prefix + ".trace.csv");
    write_text_atomic(config.out_prefix + ".summary.json", summary_to_json(result.summary));
  }
  return result;
}

std::vector<CompareRow> compare(const ExperimentConfig& config) {
  if (config.schemes.empty()) throw validation_error("compare needs at least one scheme");
  config.problem.validate();
  const std::optional<Point> target = resolve_target(config.problem);

  std::vector<CompareRow> rows;
  for (const SchemeConfig& sc : config.schemes) {
    const ProblemSpec problem = problem_for_scheme(config.problem, sc.scheme);
    RunResult result = execute_scheme(problem, sc, config.stop, config.digest,
                                      target ? &*target : nullptr, config.force);
    rows.push_back(CompareRow{sc.scheme, std::move(result.summary)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.summary.iterations != b.summary.iterations)
      return a.summary.iterations < b.summary.iterations;
    return a.summary.wall_time_ms < b.summary.wall_time_ms;
  });

  if (!config.out_prefix.empty()) {
    std::string csv = "scheme,outcome,iterations,final_residual,final_dist_to_target,wall_time_ms\n";
    for (const CompareRow& row : rows) {
      std::ostringstream line;
      line << row.scheme << ',' << row.summary.outcome << ',' << row.summary.iterations << ','
           << row.summary.final_residual << ',';
      if (row.summary.final_dist_to_target) line << *row.summary.final_dist_to_target;
      line << ',' << row.summary.wall_time_ms << '\n';
      csv += line.str();
    }
    write_text_atomic(config.out_prefix + ".compare.csv", csv);
  }
  return rows;
}

}  // namespace fixpoint
