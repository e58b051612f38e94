#include <string>

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"
#include "internal.hpp"

namespace fixpoint {

void ProblemSpec::validate() const {
  if (space.dim == 0) throw argument_error("problem: zero-dimensional space");
  if (u.dim() != space.dim || v1.dim() != space.dim || witness.dim() != space.dim)
    throw argument_error("problem: anchor/start/witness dimension does not match the space");
  if (analytic_target && analytic_target->dim() != space.dim)
    throw argument_error("problem: analytic target dimension does not match the space");

  if (kind == ProblemKind::CommonFixedPoint) {
    if (maps.empty() || !ops.empty())
      throw argument_error("problem: common_fixed_point needs maps and no operators");
    if (maps.size() > 65)
      throw argument_error("problem: at most 65 maps (family index M <= 64)");
    for (const auto& m : maps) {
      validate_map(space, m);
      if (!in_fixed_set(m, witness, 1e-9))
        throw validation_error("problem witness is not a common fixed point");
    }
  } else {
    if (ops.empty() || !maps.empty())
      throw argument_error("problem: common_zero needs operators and no maps");
    if (ops.size() > 65)
      throw argument_error("problem: at most 65 operators (family index M <= 64)");
    for (const auto& op : ops) {
      validate_operator(space, op);
      if (!in_zero_set(op, witness, 1e-9))
        throw validation_error("problem witness is not a common zero");
    }
  }
}

std::vector<MapSpec> solution_set_pieces(const ProblemSpec& problem) {
  std::vector<MapSpec> pieces;
  if (problem.kind == ProblemKind::CommonFixedPoint) {
    for (const auto& m : problem.maps)
      for (auto& piece : fixed_set_projections(m)) pieces.push_back(std::move(piece));
  } else {
    for (const auto& op : problem.ops)
      for (auto& piece : zero_set_projections(op, problem.space.dim)) pieces.push_back(std::move(piece));
  }
  return pieces;
}

namespace detail {

Point find_witness(const ProblemSpec& problem) {
  const std::vector<MapSpec> pieces = solution_set_pieces(problem);
  const SpaceSpec eu = SpaceSpec::euclidean(problem.space.dim);
  Point x = Point::zeros(problem.space.dim);
  if (pieces.empty()) return x;

  for (int sweep = 0; sweep < 100000; ++sweep) {
    bool feasible = true;
    for (const auto& piece : pieces)
      if (!in_fixed_set(piece, x, 1e-10)) feasible = false;
    if (feasible) return x;
    for (const auto& piece : pieces) x = apply_map(eu, piece, x);
  }
  throw validation_error(
      "could not locate a common solution point; declare a witness in the config");
}

}  // namespace detail

}  // namespace fixpoint
