#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fixpoint/space.hpp"

// Catalogue of quasi-nonexpansive self-maps and of maximal monotone operators
// given through their resolvents. Every map carries a nonempty declared fixed
// set with a membership test and a known witness point, so runs can be
// checked against the hypotheses they rely on.

namespace fixpoint {

struct Halfspace {
  Point a;  // nonzero normal
  double b;
  // signed violation <a,x> - b, nonpositive inside
  double violation(const Point& x) const;
};

struct MapSpec;

// Metric projection onto {x : <a,x> <= b}.
struct HalfspaceProjection {
  Halfspace h;
  double normal_sumsq;
};

// Metric projection onto the closed ball B(center, radius).
struct BallProjection {
  Point center;
  double radius;
};

// Componentwise clamp onto [lo, hi]; also the lp metric projection since the
// objective separates per coordinate.
struct BoxProjection {
  Point lo, hi;
};

// Metric projection onto {x : Ax = c} for a consistent system; rank
// deficiency is handled through the Gram pseudoinverse.
struct AffineProjection {
  std::vector<Point> rows;
  std::vector<double> rhs;
  std::vector<double> gram_pinv;  // (m*m, row-major) pseudoinverse of A A^T
  Point least_norm;               // A^+ rhs, the witness
};

// Rotation of the plane about the origin; fixed set {0} unless the angle is
// a turn multiple.
struct PlaneRotation {
  double angle;
  double c, s;
};

// One step of the subgradient projection for f(x) = max_j(<a_j,x> - b_j):
// returns x when f(x) <= 0, otherwise x - f(x)/||g||^2 g with g the gradient
// of the attaining piece (lowest index wins ties).
struct SubgradientProjector {
  std::vector<Halfspace> cuts;
  Point witness;  // feasible point located at construction
};

// (1-lambda) I + lambda inner.
struct AveragedMap {
  std::shared_ptr<const MapSpec> inner;
  double lambda;
};

// Stages applied left to right; fixed set declared as the intersection of the
// stage fixed sets.
struct Composition {
  std::vector<MapSpec> stages;
  Point witness;
};

struct MapSpec {
  std::variant<HalfspaceProjection, BallProjection, BoxProjection, AffineProjection,
               PlaneRotation, SubgradientProjector, AveragedMap, Composition>
      v;
};

MapSpec halfspace_projection(Point a, double b);
MapSpec ball_projection(Point center, double radius);
MapSpec box_projection(Point lo, Point hi);
MapSpec affine_projection(std::vector<Point> rows, std::vector<double> rhs);
MapSpec plane_rotation(double angle);
MapSpec subgradient_projector(std::vector<Halfspace> cuts);
MapSpec averaged_map(MapSpec inner, double lambda);
MapSpec composition(std::vector<MapSpec> stages);

const char* map_kind_name(const MapSpec& map);
std::size_t map_dim(const MapSpec& map);

// True when the map's quasi-nonexpansiveness contract holds in lp norms, not
// only the Euclidean one (componentwise maps and combinations of them).
bool map_is_lp_safe(const MapSpec& map);

// Dimension agreement with the space plus the lp-safety gate above.
void validate_map(const SpaceSpec& space, const MapSpec& map);

Point apply_map(const SpaceSpec& space, const MapSpec& map, const Point& x);
double fixed_point_residual(const SpaceSpec& space, const MapSpec& map, const Point& x);

// Membership in the declared fixed set, tested geometrically (constraint
// violations against tol), not through the residual.
bool in_fixed_set(const MapSpec& map, const Point& x, double tol);
Point map_witness(const MapSpec& map);

// Projection maps whose fixed sets intersect to exactly the declared fixed
// set of this map; empty means the whole space. The oracle consumes these.
std::vector<MapSpec> fixed_set_projections(const MapSpec& map);

// ---------------------------------------------------------------------------

// d(scale/2)||x - center||^2: resolvent shifts toward center.
struct QuadraticSubdifferential {
  Point center;
  double scale;
};

// d(weight ||x||_1): resolvent is the soft threshold by r * weight.
struct L1Subdifferential {
  double weight;
};

// Normal cone of the fixed set of a catalogue projection; resolvent is that
// projection for every r.
struct IndicatorSubdifferential {
  std::shared_ptr<const MapSpec> projection;
};

// x -> Mx for symmetric positive semidefinite M; resolvent solves
// (I + rM) y = x.
struct LinearPsd {
  std::vector<Point> rows;
};

struct OperatorSpec {
  std::variant<QuadraticSubdifferential, L1Subdifferential, IndicatorSubdifferential, LinearPsd> v;
};

OperatorSpec quadratic_subdifferential(Point center, double scale);
OperatorSpec l1_subdifferential(double weight);
OperatorSpec indicator_subdifferential(MapSpec projection);
OperatorSpec linear_psd(std::vector<Point> rows);

const char* operator_kind_name(const OperatorSpec& op);
std::size_t operator_dim(const OperatorSpec& op, std::size_t space_dim);
bool operator_is_lp_safe(const OperatorSpec& op);
void validate_operator(const SpaceSpec& space, const OperatorSpec& op);

Point resolvent(const SpaceSpec& space, const OperatorSpec& op, double r, const Point& x);
bool in_zero_set(const OperatorSpec& op, const Point& x, double tol);
Point operator_witness(const OperatorSpec& op, std::size_t space_dim);
std::vector<MapSpec> zero_set_projections(const OperatorSpec& op, std::size_t space_dim);

// Defect of the resolvent comparison bound
//   ||J_k x - J_l x|| <= (|k - l|/k) ||x - J_k x||,
// returned as LHS - RHS; nonpositive up to roundoff.
double resolvent_identity_defect(const SpaceSpec& space, const OperatorSpec& op, const Point& x,
                                 double k, double l);

// w = weights[0] * base + sum_i weights[i] * images[i-1]; weights must be
// nonnegative and sum to 1 within 1e-12.
Point family_combination(const SpaceSpec& space, std::span<const double> weights,
                         const Point& base, std::span<const Point> images);

// Defect of the convex-combination norm bound with g(t) = t^2 in Euclidean
// space:
//   ||sum_i w_i a_i||^2 <= sum_i w_i ||a_i||^2 - w_k w_l ||a_k - a_l||^2,
// returned as LHS - RHS; nonpositive up to roundoff.
double combination_inequality_defect(const SpaceSpec& space, std::span<const double> weights,
                                     std::span<const Point> points, std::size_t k, std::size_t l);

}  // namespace fixpoint
