#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fixpoint/operators.hpp"
#include "fixpoint/schedules.hpp"
#include "fixpoint/space.hpp"

namespace fixpoint {

// Stopping criteria checked in order: residual, target distance, step size;
// max_iters is always enforced last.
struct StopRule {
  std::size_t max_iters = 1000;
  std::optional<double> residual_tol;
  std::optional<double> step_tol;
  std::optional<double> target_tol;

  void validate() const;
};

enum class Outcome { ConvergedResidual, ConvergedStep, ConvergedTarget, MaxIters };

const char* outcome_name(Outcome o);

struct TraceRecord {
  std::size_t n = 0;
  Point v;
  double step_norm = 0.0;            // ||v_{n+1} - v_n||, 0 on the final record
  std::vector<double> residuals;     // ||v_n - T_i v_n|| per map/resolvent
  double w_gap = 0.0;                // ||w_n - v_n||, 0 on the final record
  std::optional<double> dist_to_target;
  std::optional<double> step2_defect;
};

// Per-transition coefficients retained so the proof inequalities can be
// replayed from the trace alone.
struct TraceMeta {
  std::string scheme;
  SpaceSpec space = SpaceSpec::euclidean(1);
  Point u = Point::zeros(1);
  std::vector<double> xi;
  std::vector<double> zeta;
  std::vector<std::vector<double>> weight_rows;
};

struct Trace {
  std::vector<TraceRecord> records;
  Outcome outcome = Outcome::MaxIters;
  std::uint64_t config_digest = 0;
  TraceMeta meta;
};

struct RunOptions {
  const Point* target = nullptr;  // oracle target; enables dist_to_target
  bool skip_validation = false;   // run despite a failing precondition report
};

// Anchored family scheme: w_n = phi_{n,0} v_n + sum_i phi_{n,i} T_i v_n;
// v_{n+1} = xi_n u + (1-zeta_n) T_0 v_n + (zeta_n-xi_n) T_0 w_n.
// maps[0] is T_0; maps.size() = M+1.
Trace run_itnew(const SpaceSpec& space, const Point& u, const Point& v1,
                const std::vector<MapSpec>& maps, const ScheduleSpec& xi,
                const ScheduleSpec& zeta, const FamilyWeights& weights, const StopRule& stop,
                const RunOptions& opt = {});

// Same recursion with T_i replaced by the resolvent of ops[i] at scale r_n.
Trace run_resolvent_scheme(const SpaceSpec& space, const Point& u, const Point& v1,
                           const std::vector<OperatorSpec>& ops, const ResolventScaleSchedule& r,
                           const ScheduleSpec& xi, const ScheduleSpec& zeta,
                           const FamilyWeights& weights, const StopRule& stop,
                           const RunOptions& opt = {});

// Single-map variant: w_n = (1-phi_n) v_n + phi_n T v_n;
// v_{n+1} = xi_n u + (1-zeta_n) T v_n + (zeta_n-xi_n) T w_n.
Trace run_corollary_single(const SpaceSpec& space, const Point& u, const Point& v1,
                           const MapSpec& T, const ScheduleSpec& xi, const ScheduleSpec& zeta,
                           const ScheduleSpec& phi, const StopRule& stop,
                           const RunOptions& opt = {});

// Classical anchor iteration a_{n+1} = phi_n u + (1-phi_n) T a_n.
Trace run_halpern(const SpaceSpec& space, const Point& u, const Point& a0, const MapSpec& T,
                  const ScheduleSpec& phi, const StopRule& stop, const RunOptions& opt = {});

// Three-schedule scheme: y_n = (1-zeta_n) x_n + zeta_n T x_n;
// x_{n+1} = (1-wp_n) x_n + xi_n T x_n + (wp_n-xi_n) T y_n.
Trace run_dk(const SpaceSpec& space, const Point& x0, const MapSpec& T, const ScheduleSpec& wp,
             const ScheduleSpec& xi, const ScheduleSpec& zeta, const StopRule& stop,
             const RunOptions& opt = {});

// max_n [ ||v_n - p|| - max(||u - p||, ||v_1 - p||) ] over the trace; the
// boundedness inequality gives <= 0 up to roundoff for any p in the common
// fixed-point/zero set.
double check_step1_bound(const Trace& trace, const Point& u, const Point& v1, const Point& p);

// max_n [ ||v_{n+1}-z||^2 - (1-xi_n)||v_n-z||^2 - 2 xi_n <u-z, v_{n+1}-z> ]
// with z the projection of u onto the solution set; Euclidean traces only.
double check_step2_recursion(const Trace& trace, const Point& u, const Point& z);

// max_{n,i} [ zeta_n phi_0 phi_i ||v_n - T_i v_n||^2
//             - (||v_n-z||^2 - ||v_{n+1}-z||^2 + xi_n K) ], Euclidean only.
double check_residual_bound(const Trace& trace, const Point& z, const ScheduleSpec& xi,
                            const ScheduleSpec& zeta, const FamilyWeights& weights, double K);

// The constant consumed by check_residual_bound:
// sup_{n,i} [ |  ||u-z||^2 - ||v_n-z||^2 | + phi_0 phi_i ||v_n - T_i v_n||^2 ].
double residual_bound_constant(const Trace& trace, const Point& u, const Point& z,
                               const FamilyWeights& weights);

struct DecayVerdict {
  double tail_max = 0.0;
  bool below_tol = false;
};

// Checks the hypothesis mu_{n+1} <= (1-phi_n) mu_n + phi_n eps_n over the
// finite sequences (throwing with the violating index otherwise) and reports
// the max of mu over the trailing window (default: the last tenth) together
// with whether it is below tol. Never claims an infinite limit.
DecayVerdict decay_recursion_verdict(std::span<const double> mu, std::span<const double> phi,
                                     std::span<const double> eps, double tol,
                                     std::size_t window = 0);

}  // namespace fixpoint
