// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Tolerances are pinned here, next to the checks that consume them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "fixpoint/engine.hpp"
#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"
#include "fixpoint/space.hpp"

using namespace fixpoint;

namespace {

constexpr double kTargetTol = 1e-3;        // criteria 1, 2, 10
constexpr double kReplayTol = 1e-8;        // criterion 3
constexpr double kResolventTol = 1e-10;    // criterion 4
constexpr double kCombinationTol = 1e-10;  // criterion 5
constexpr double kQuasiTol = 1e-10;        // criterion 6
constexpr double kIdempotentTol = 1e-12;   // criterion 6
constexpr double kModulusTol = 5e-3;       // criterion 7
constexpr double kResidualTol = 1e-8;      // criterion 10
constexpr std::size_t kIterBudget = 200000;
constexpr std::size_t kHalpernBudget = 100000;
constexpr double kWallBudgetMs = 5000.0;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  if (!pass) ++failures;
}

void guarded(int id, const std::string& label, void (*body)(int, const std::string&)) {
  try {
    body(id, label);
  } catch (const std::exception& e) {
    report(id, false, label + ": unexpected exception: " + e.what());
  }
}

std::string config_path(const char* name) {
  return std::string(FIXPOINT_CONFIG_DIR) + "/" + name;
}

// bundled single-scheme configs that complete without a validation failure
const char* const kRunnableConfigs[] = {
    "feasibility2.json",   "feasibility2_res.json", "identity.json", "halpern_rotation.json",
    "corollary_ball.json", "quadratic_zero.json",   "dk_averaged.json", "lp_box.json",
};

Point random_point(std::mt19937_64& rng, std::size_t d, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> c(d);
  for (auto& x : c) x = dist(rng);
  return Point(std::move(c));
}

struct TimedRun {
  RunResult result;
  double ms = 0.0;
};

TimedRun timed_run(const char* config) {
  auto t0 = std::chrono::steady_clock::now();
  RunResult r = run_experiment(load_config(config_path(config)));
  auto t1 = std::chrono::steady_clock::now();
  return {std::move(r), std::chrono::duration<double, std::milli>(t1 - t0).count()};
}

char buffer[512];

void criterion_witness(int id, const char* config, const Point& expected_target) {
  ExperimentConfig cfg = load_config(config_path(config));
  auto target = resolve_target(cfg.problem);
  if (!target) {
    report(id, false, std::string(config) + ": no oracle target resolved");
    return;
  }
  double oracle_gap = norm_diff(cfg.problem.space, *target, expected_target);
  TimedRun run = timed_run(config);
  const Summary& s = run.result.summary;
  bool pass = oracle_gap <= 1e-9 && s.outcome == "converged_target" &&
              s.final_dist_to_target && *s.final_dist_to_target < kTargetTol &&
              s.iterations <= kIterBudget && run.ms < kWallBudgetMs;
  std::snprintf(buffer, sizeof buffer,
                "%s: outcome=%s dist=%.3g iters=%zu wall=%.0fms oracle_gap=%.2g", config,
                s.outcome.c_str(), s.final_dist_to_target.value_or(-1.0), s.iterations, run.ms,
                oracle_gap);
  report(id, pass, buffer);
}

void criterion1(int id, const std::string&) {
  criterion_witness(id, "feasibility2.json", Point({0.0, 1.0}));
}

void criterion2(int id, const std::string&) {
  criterion_witness(id, "feasibility2_res.json", Point({0.0, 1.0}));
}

void criterion3(int id, const std::string&) {
  double worst = -1e300;
  std::string worst_at = "none";
  std::size_t replayed = 0;
  for (const char* name : kRunnableConfigs) {
    ExperimentConfig cfg = load_config(config_path(name));
    RunResult run = run_experiment(cfg);
    if (run.summary.outcome.rfind("converged", 0) != 0) {
      report(id, false, std::string(name) + ": run did not converge");
      return;
    }
    const std::string& scheme = cfg.schemes[0].scheme;
    if (scheme == "dk") continue;  // no anchor: the replayed bounds do not apply
    const ProblemSpec& p = cfg.problem;
    const Trace& tr = run.trace;

    auto note = [&](const char* check, double defect) {
      ++replayed;
      if (defect > worst) {
        worst = defect;
        worst_at = std::string(name) + ":" + check;
      }
    };

    note("step1", check_step1_bound(tr, p.u, p.v1, p.witness));

    auto z = resolve_target(p);
    if (!z || !p.space.is_euclidean()) continue;
    note("step2", check_step2_recursion(tr, p.u, *z));

    if (scheme == "halpern") continue;  // no family weights behind the residual bound
    const ScheduleBundle& b = cfg.schemes[0].schedules;
    FamilyWeights w = b.weights;
    if (scheme == "corollary") {
      if (b.phi.form != ScheduleSpec::Form::Constant) continue;
      w = FamilyWeights::uniform(1, 1.0 - b.phi.c);
    }
    double K = residual_bound_constant(tr, p.u, *z, w);
    note("residual", check_residual_bound(tr, *z, b.xi, b.zeta, w, K));
  }
  std::snprintf(buffer, sizeof buffer, "%zu replayed inequalities, worst defect %.3g at %s",
                replayed, worst, worst_at.c_str());
  report(id, worst <= kReplayTol && replayed >= 12, buffer);
}

void criterion4(int id, const std::string&) {
  const SpaceSpec e2 = SpaceSpec::euclidean(2);
  std::vector<OperatorSpec> ops;
  ops.push_back(quadratic_subdifferential(Point({0.5, -1.0}), 2.0));
  ops.push_back(l1_subdifferential(1.0));
  ops.push_back(indicator_subdifferential(ball_projection(Point({0.0, 0.0}), 1.5)));
  ops.push_back(linear_psd({Point({2.0, 1.0}), Point({1.0, 2.0})}));

  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> logr(-2.0, 2.0);
  double worst = -1e300;
  std::string worst_kind;
  for (const auto& op : ops) {
    for (int t = 0; t < 1000; ++t) {
      Point a = random_point(rng, 2, 4.0);
      double k = std::pow(10.0, logr(rng));
      double l = std::pow(10.0, logr(rng));
      double defect = resolvent_identity_defect(e2, op, a, k, l);
      if (defect > worst) {
        worst = defect;
        worst_kind = operator_kind_name(op);
      }
    }
  }
  std::snprintf(buffer, sizeof buffer, "4000 draws, worst defect %.3g (%s)", worst,
                worst_kind.c_str());
  report(id, worst <= kResolventTol, buffer);
}

void criterion5(int id, const std::string&) {
  const SpaceSpec e2 = SpaceSpec::euclidean(2);
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> uw(0.05, 1.0);
  std::uniform_int_distribution<std::size_t> usize(2, 5);
  double worst = -1e300;
  for (int t = 0; t < 1000; ++t) {
    std::size_t m = usize(rng);
    std::vector<Point> pts;
    std::vector<double> w(m);
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      pts.push_back(random_point(rng, 2, 4.0));
      w[i] = uw(rng);
      sum += w[i];
    }
    for (auto& x : w) x /= sum;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t l = 0; l < m; ++l) {
        if (k == l) continue;
        worst = std::max(worst, combination_inequality_defect(e2, w, pts, k, l));
      }
  }
  std::snprintf(buffer, sizeof buffer, "1000 configurations, worst defect %.3g", worst);
  report(id, worst <= kCombinationTol, buffer);
}

void criterion6(int id, const std::string&) {
  const SpaceSpec e2 = SpaceSpec::euclidean(2);
  std::vector<MapSpec> maps;
  maps.push_back(halfspace_projection(Point({1.0, -2.0}), 0.5));
  maps.push_back(ball_projection(Point({0.5, -0.5}), 2.0));
  maps.push_back(box_projection(Point({-1.0, 0.0}), Point({1.0, 2.0})));
  maps.push_back(affine_projection({Point({1.0, 1.0})}, {1.0}));
  maps.push_back(plane_rotation(1.1));
  maps.push_back(subgradient_projector(
      {Halfspace{Point({1.0, 0.0}), 0.0}, Halfspace{Point({0.0, 1.0}), 1.0}}));
  maps.push_back(averaged_map(ball_projection(Point({0.0, 0.0}), 1.0), 0.5));
  maps.push_back(composition({halfspace_projection(Point({1.0, 0.0}), 0.0),
                              box_projection(Point({-3.0, -3.0}), Point({3.0, 3.0}))}));

  std::mt19937_64 rng(1006);
  double worst_q = -1e300, worst_i = -1e300;
  std::string worst_kind;
  for (const auto& T : maps) {
    bool projection = map_dim(T) == 2 && fixed_point_residual(e2, T, map_witness(T)) == 0.0 &&
                      (std::string(map_kind_name(T)) == "halfspace" ||
                       std::string(map_kind_name(T)) == "ball" ||
                       std::string(map_kind_name(T)) == "box" ||
                       std::string(map_kind_name(T)) == "affine");
    Point p = map_witness(T);
    for (int t = 0; t < 1000; ++t) {
      Point x = random_point(rng, 2, 4.0);
      Point tx = apply_map(e2, T, x);
      double q = norm_diff(e2, tx, p) - norm_diff(e2, x, p);
      if (q > worst_q) {
        worst_q = q;
        worst_kind = map_kind_name(T);
      }
      if (projection)
        worst_i = std::max(worst_i, norm_diff(e2, apply_map(e2, T, tx), tx));
    }
  }
  std::snprintf(buffer, sizeof buffer,
                "8 map kinds x 1000 draws, worst quasi-nonexpansiveness defect %.3g (%s), worst "
                "reprojection drift %.3g",
                worst_q, worst_kind.c_str(), worst_i);
  report(id, worst_q <= kQuasiTol && worst_i <= kIdempotentTol, buffer);
}

void criterion7(int id, const std::string&) {
  const SpaceSpec e2 = SpaceSpec::euclidean(2);
  const double delta_exact = 1.0 - std::sqrt(3.0) / 2.0;
  const double rho_exact = std::sqrt(2.0) - 1.0;
  double delta = convexity_modulus_estimate(e2, 1.0, 100000, 1);
  double rho = smoothness_modulus_estimate(e2, 1.0, 100000, 2);

  bool monotone = true;
  double prev = -1.0;
  for (int k = 1; k <= 10; ++k) {
    double cur = convexity_modulus_estimate(e2, 0.2 * k, 100000, 3);
    if (cur < prev - 1e-12) monotone = false;
    prev = cur;
  }
  std::snprintf(buffer, sizeof buffer,
                "delta(1)=%.6f (exact %.6f), rho(1)=%.6f (exact %.6f), grid %s", delta,
                delta_exact, rho, rho_exact, monotone ? "nondecreasing" : "NOT monotone");
  report(id,
         std::fabs(delta - delta_exact) <= kModulusTol &&
             std::fabs(rho - rho_exact) <= kModulusTol && monotone,
         buffer);
}

void criterion8(int id, const std::string&) {
  auto v = [](const ConditionReport& rep, const char* name) {
    const ConditionEntry* e = rep.find(name);
    return e ? e->verdict : Verdict::Inconclusive;
  };

  auto r1 = validate_halpern(ScheduleSpec::power(1.0, 1.0));
  bool ok1 = v(r1, "C1") == Verdict::Holds && v(r1, "C2") == Verdict::Holds &&
             v(r1, "C3") == Verdict::Fails;

  auto r2 = validate_halpern(ScheduleSpec::power(1.0, 2.0));
  bool ok2 = v(r2, "C2") == Verdict::Fails;

  auto r3 = validate_theorem_conditions(ScheduleSpec::power(0.5, 1.0),
                                        ScheduleSpec::constant(0.5),
                                        FamilyWeights::uniform(4, 0.5));
  bool ok3 = v(r3, "(1)") == Verdict::Holds && v(r3, "(2)") == Verdict::Holds &&
             v(r3, "(3)") == Verdict::Holds && v(r3, "(4)") == Verdict::Holds &&
             v(r3, "coeff") == Verdict::Holds;

  std::snprintf(buffer, sizeof buffer,
                "PowerLaw(1,1)%s, PowerLaw(1,2)%s, family conditions%s", ok1 ? " ok" : " WRONG",
                ok2 ? " ok" : " WRONG", ok3 ? " ok" : " WRONG");
  report(id, ok1 && ok2 && ok3, buffer);
}

void criterion9(int id, const std::string&) {
  std::size_t checked = 0;
  for (const char* name : kRunnableConfigs) {
    RunResult a = run_experiment(load_config(config_path(name)));
    RunResult b = run_experiment(load_config(config_path(name)));
    if (trace_to_csv(a.trace) != trace_to_csv(b.trace)) {
      report(id, false, std::string(name) + ": trace CSV bytes differ between executions");
      return;
    }
    ++checked;
  }
  std::snprintf(buffer, sizeof buffer, "%zu configs re-run byte-identically", checked);
  report(id, checked == 8, buffer);
}

void criterion10(int id, const std::string&) {
  TimedRun hal = timed_run("halpern_rotation.json");
  const Summary& hs = hal.result.summary;
  bool hal_ok = hs.outcome == "converged_target" && hs.final_dist_to_target &&
                *hs.final_dist_to_target < kTargetTol && hs.iterations <= kHalpernBudget;

  TimedRun dk = timed_run("dk_averaged.json");
  const Summary& ds = dk.result.summary;
  bool dk_ok = ds.outcome == "converged_residual" && ds.final_residual < kResidualTol;

  std::snprintf(buffer, sizeof buffer,
                "anchor-on-rotation dist=%.3g iters=%zu; averaged-projection residual=%.3g "
                "iters=%zu",
                hs.final_dist_to_target.value_or(-1.0), hs.iterations, ds.final_residual,
                ds.iterations);
  report(id, hal_ok && dk_ok, buffer);
}

}  // namespace

int main() {
  guarded(1, "feasibility witness", criterion1);
  guarded(2, "common-zero witness", criterion2);
  guarded(3, "proof-inequality replay", criterion3);
  guarded(4, "resolvent comparison bound", criterion4);
  guarded(5, "combination inequality", criterion5);
  guarded(6, "quasi-nonexpansiveness suite", criterion6);
  guarded(7, "geometry probes", criterion7);
  guarded(8, "schedule validator truth table", criterion8);
  guarded(9, "determinism", criterion9);
  guarded(10, "baseline sanity", criterion10);

  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
