#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"
#include "fixpoint/kernels.hpp"

namespace fixpoint {

namespace {

// exact polyhedral projection by active-set enumeration: the projection onto
// the feasible set is the nearest feasible candidate among projections onto
// every subset of constraints treated as equalities
std::optional<Point> enumerate_projection(const SpaceSpec& space, const Point& u,
                                          const std::vector<Point>& eq_rows,
                                          const std::vector<double>& eq_rhs,
                                          const std::vector<Point>& in_rows,
                                          const std::vector<double>& in_rhs) {
  const auto& K = kernels::active();
  const std::size_t m = in_rows.size();
  std::optional<Point> best;
  double best_dist = std::numeric_limits<double>::infinity();

  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<Point> rows = eq_rows;
    std::vector<double> rhs = eq_rhs;
    for (std::size_t b = 0; b < m; ++b)
      if (mask & (1u << b)) {
        rows.push_back(in_rows[b]);
        rhs.push_back(in_rhs[b]);
      }

    Point cand = u;
    if (!rows.empty()) {
      try {
        const MapSpec proj = affine_projection(rows, rhs);
        cand = apply_map(space, proj, u);
      } catch (const argument_error&) {
        continue;  // inconsistent constraint subset
      }
    }

    bool feasible = true;
    for (std::size_t i = 0; i < m && feasible; ++i)
      if (K.dot(in_rows[i].data(), cand.data(), space.dim) - in_rhs[i] > 1e-10) feasible = false;
    for (std::size_t i = 0; i < eq_rows.size() && feasible; ++i)
      if (std::fabs(K.dot(eq_rows[i].data(), cand.data(), space.dim) - eq_rhs[i]) > 1e-10)
        feasible = false;
    if (!feasible) continue;

    const double dist = norm_diff(space, u, cand);
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace

Point oracle_target(const ProblemSpec& problem) {
  if (!problem.space.is_euclidean())
    throw oracle_error("projection oracle supports Euclidean problems only");
  const SpaceSpec& space = problem.space;
  const std::size_t d = space.dim;

  const std::vector<MapSpec> pieces = solution_set_pieces(problem);
  for (const auto& piece : pieces)
    if (!in_fixed_set(piece, problem.witness, 1e-9))
      throw oracle_error("problem witness fails the solution-set feasibility check");

  if (pieces.empty()) return problem.u;
  if (pieces.size() == 1) return apply_map(space, pieces[0], problem.u);

  // Dykstra: cyclic projections with per-piece corrections converge to the
  // metric projection onto the intersection
  std::vector<double> x = problem.u.coords();
  std::vector<std::vector<double>> corr(pieces.size(), std::vector<double>(d, 0.0));
  bool converged = false;
  for (std::size_t sweep = 0; sweep < 1000000 && !converged; ++sweep) {
    const std::vector<double> before = x;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      std::vector<double> shifted(d);
      for (std::size_t i = 0; i < d; ++i) shifted[i] = x[i] + corr[j][i];
      const Point y = apply_map(space, pieces[j], Point(std::move(shifted)));
      for (std::size_t i = 0; i < d; ++i) corr[j][i] = (x[i] + corr[j][i]) - y[i];
      x = y.coords();
    }
    double change = 0.0;
    for (std::size_t i = 0; i < d; ++i) change = std::max(change, std::fabs(x[i] - before[i]));
    converged = change <= 1e-12;
  }
  if (!converged)
    throw oracle_error("projection oracle did not reach the 1e-12 step tolerance in 10^6 sweeps");

  const Point result{std::vector<double>(x)};
  for (const auto& piece : pieces)
    if (!in_fixed_set(piece, result, 1e-7))
      throw oracle_error("projection oracle result fails the feasibility check");

  // independent cross-check when every piece is linear
  std::vector<Point> eq_rows, in_rows;
  std::vector<double> eq_rhs, in_rhs;
  bool all_linear = true;
  for (const auto& piece : pieces) {
    if (const auto* h = std::get_if<HalfspaceProjection>(&piece.v)) {
      in_rows.push_back(h->h.a);
      in_rhs.push_back(h->h.b);
    } else if (const auto* a = std::get_if<AffineProjection>(&piece.v)) {
      for (std::size_t i = 0; i < a->rows.size(); ++i) {
        eq_rows.push_back(a->rows[i]);
        eq_rhs.push_back(a->rhs[i]);
      }
    } else {
      all_linear = false;
    }
  }
  if (all_linear && in_rows.size() <= 16) {
    const std::optional<Point> check =
        enumerate_projection(space, problem.u, eq_rows, eq_rhs, in_rows, in_rhs);
    if (!check) throw oracle_error("active-constraint enumeration found no feasible candidate");
    if (norm_diff(space, result, *check) > 1e-10)
      throw oracle_error("projection oracle cross-check disagreement above 1e-10");
  }
  return result;
}

std::optional<Point> resolve_target(const ProblemSpec& problem) {
  switch (problem.oracle) {
    case OracleMode::None:
      return std::nullopt;
    case OracleMode::Analytic:
      if (!problem.analytic_target)
        throw argument_error("oracle mode is analytic but no target is declared");
      return *problem.analytic_target;
    case OracleMode::Computed:
      return oracle_target(problem);
  }
  return std::nullopt;
}

}  // namespace fixpoint
