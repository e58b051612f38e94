#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fixpoint/engine.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"
#include "fixpoint/space.hpp"

namespace fixpoint {

enum class ProblemKind { CommonFixedPoint, CommonZero };
enum class OracleMode { None, Computed, Analytic };

// A feasibility/zero problem: find the projection of the anchor u onto the
// common fixed-point set of `maps` (or the common zero set of `ops`).
struct ProblemSpec {
  SpaceSpec space = SpaceSpec::euclidean(1);
  ProblemKind kind = ProblemKind::CommonFixedPoint;
  std::vector<MapSpec> maps;
  std::vector<OperatorSpec> ops;
  Point u = Point::zeros(1);
  Point v1 = Point::zeros(1);
  Point witness = Point::zeros(1);  // feasible point certifying nonemptiness
  OracleMode oracle = OracleMode::None;
  std::optional<Point> analytic_target;

  std::size_t family_size() const {
    return kind == ProblemKind::CommonFixedPoint ? maps.size() : ops.size();
  }
  void validate() const;
};

// Projection maps whose fixed sets intersect to the problem's solution set.
// An empty list means the solution set is the whole space.
std::vector<MapSpec> solution_set_pieces(const ProblemSpec& problem);

// Independent metric projection of u onto the solution set (Euclidean only):
// exact formula for a single piece, cyclic correction sweeps (Dykstra) for
// intersections, cross-checked by active-constraint enumeration when every
// piece is linear. Never calls the iteration engine.
Point oracle_target(const ProblemSpec& problem);

// Analytic target if declared, oracle projection if requested, nothing
// otherwise.
std::optional<Point> resolve_target(const ProblemSpec& problem);

// Every sequence any scheme consumes; unused entries keep defaults.
struct ScheduleBundle {
  ScheduleSpec xi = ScheduleSpec::constant(0.5);
  ScheduleSpec zeta = ScheduleSpec::constant(0.5);
  ScheduleSpec phi = ScheduleSpec::constant(0.5);
  ScheduleSpec wp = ScheduleSpec::constant(0.5);
  FamilyWeights weights = FamilyWeights::uniform(0, 1.0);
  ResolventScaleSchedule r = ResolventScaleSchedule::constant(1.0);
};

struct SchemeConfig {
  std::string scheme;  // itnew | res | corollary | halpern | dk
  ScheduleBundle schedules;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<SchemeConfig> schemes;  // single entry for run, several for compare
  StopRule stop;
  std::uint64_t seed = 0;
  std::string out_prefix;  // empty: no files written
  std::uint64_t digest = 0;
  bool force = false;  // propagate --force to the engine validation gate
};

// Parses the JSON config schema documented in docs/config-schema.md. The
// FIXPOINT_SEED environment variable overrides the seed field.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text);

// Parses a single schedule object {"form": ...}; used for bare schedule
// inputs to the validate command.
ScheduleSpec schedule_from_json(const std::string& text);

struct Summary {
  std::string outcome;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::optional<double> final_dist_to_target;
  double wall_time_ms = 0.0;
  std::uint64_t config_digest = 0;
};

std::string summary_to_json(const Summary& s);

struct RunResult {
  Trace trace;
  Summary summary;
};

// Executes schemes[0]; writes <out>.trace.csv and <out>.summary.json when an
// output prefix is set. Deterministic given the config.
RunResult run_experiment(const ExperimentConfig& config);

struct CompareRow {
  std::string scheme;
  Summary summary;
};

// Runs every scheme on the shared problem and stop rule; rows sorted by
// iterations, ties broken by wall time. Writes <out>.compare.csv when an
// output prefix is set. Single-map schemes receive multi-map problems as a
// composition of the family.
std::vector<CompareRow> compare(const ExperimentConfig& config);

// Trace CSV: header n,step_norm,w_gap,residual_max,residual_i0..,
// [dist_to_target],[step2_defect],v0..; shortest round-trip floats, LF line
// endings, empty cell for a missing optional. Carries records only.
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& text);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

// write-temp-then-rename
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// 800x500 SVG with log10 residual_max and, when present, log10
// dist_to_target vs n; pure function of the CSV bytes.
std::string plot_svg_from_csv(const std::string& csv_text);
void emit_plot(const std::filesystem::path& trace_csv, const std::filesystem::path& out_svg);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace fixpoint
