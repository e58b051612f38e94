#include "fixpoint/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dense.hpp"
#include "fixpoint/errors.hpp"
#include "fixpoint/kernels.hpp"

namespace fixpoint {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const kernels::Backend& K() { return kernels::active(); }

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw argument_error(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

// true when the rotation angle is a whole number of turns, making the map the
// identity with fixed set the whole plane
bool rotation_is_identity(const PlaneRotation& r) {
  return std::fabs(std::remainder(r.angle, 2.0 * 3.141592653589793238462643383279502884)) < 1e-15;
}

Point project_halfspace(const HalfspaceProjection& m, const Point& x) {
  const double viol = m.h.violation(x);
  if (viol <= 0.0) return x;
  std::vector<double> out(x.coords());
  K().axpy(out.data(), -viol / m.normal_sumsq, m.h.a.data(), x.dim());
  return Point(std::move(out));
}

}  // namespace

double Halfspace::violation(const Point& x) const {
  return K().dot(a.data(), x.data(), a.dim()) - b;
}

MapSpec halfspace_projection(Point a, double b) {
  const double ss = K().sumsq(a.data(), a.dim());
  if (!(ss > 0.0)) throw argument_error("halfspace normal must be nonzero");
  return MapSpec{HalfspaceProjection{Halfspace{std::move(a), b}, ss}};
}

MapSpec ball_projection(Point center, double radius) {
  if (!(radius > 0.0)) throw argument_error("ball radius must be positive");
  return MapSpec{BallProjection{std::move(center), radius}};
}

MapSpec box_projection(Point lo, Point hi) {
  require_same_dim(lo.dim(), hi.dim(), "box_projection");
  for (std::size_t i = 0; i < lo.dim(); ++i)
    if (lo[i] > hi[i]) throw argument_error("box bounds must satisfy lo <= hi");
  return MapSpec{BoxProjection{std::move(lo), std::move(hi)}};
}

MapSpec affine_projection(std::vector<Point> rows, std::vector<double> rhs) {
  if (rows.empty() || rows.size() != rhs.size())
    throw argument_error("affine_projection: need matching nonempty rows and rhs");
  const std::size_t m = rows.size(), d = rows[0].dim();
  for (const auto& r : rows) require_same_dim(r.dim(), d, "affine_projection");

  std::vector<double> gram(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      gram[i * m + j] = K().dot(rows[i].data(), rows[j].data(), d);
  // rank cut at (1e-10 * sigma_max)^2 on the Gram eigenvalues
  std::vector<double> gpinv = dense::sym_pinv(gram, m, 1e-20);

  std::vector<double> gb(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) gb[i] += gpinv[i * m + j] * rhs[j];
  std::vector<double> least(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) K().axpy(least.data(), gb[i], rows[i].data(), d);

  double scale = 1.0;
  for (double b : rhs) scale = std::max(scale, std::fabs(b));
  for (std::size_t i = 0; i < m; ++i) {
    const double res = K().dot(rows[i].data(), least.data(), d) - rhs[i];
    if (std::fabs(res) > 1e-9 * scale)
      throw argument_error("affine_projection: constraint system is inconsistent");
  }
  return MapSpec{AffineProjection{std::move(rows), std::move(rhs), std::move(gpinv),
                                  Point(std::move(least))}};
}

MapSpec plane_rotation(double angle) {
  if (!std::isfinite(angle)) throw argument_error("rotation angle must be finite");
  return MapSpec{PlaneRotation{angle, std::cos(angle), std::sin(angle)}};
}

MapSpec subgradient_projector(std::vector<Halfspace> cuts) {
  if (cuts.empty()) throw argument_error("subgradient_projector: need at least one halfspace");
  const std::size_t d = cuts[0].a.dim();
  std::vector<double> nss(cuts.size());
  for (std::size_t j = 0; j < cuts.size(); ++j) {
    require_same_dim(cuts[j].a.dim(), d, "subgradient_projector");
    nss[j] = K().sumsq(cuts[j].a.data(), d);
    if (!(nss[j] > 0.0)) throw argument_error("subgradient_projector: zero normal");
  }

  // cyclic projections locate a feasible witness; the target set is assumed
  // nonempty and this throws if the sweep stalls without reaching it
  std::vector<double> x(d, 0.0);
  bool feasible = false;
  for (int sweep = 0; sweep < 100000 && !feasible; ++sweep) {
    for (std::size_t j = 0; j < cuts.size(); ++j) {
      const double viol = K().dot(cuts[j].a.data(), x.data(), d) - cuts[j].b;
      if (viol > 0.0) K().axpy(x.data(), -viol / nss[j], cuts[j].a.data(), d);
    }
    feasible = true;
    for (std::size_t j = 0; j < cuts.size(); ++j)
      if (K().dot(cuts[j].a.data(), x.data(), d) - cuts[j].b > 1e-12) feasible = false;
  }
  if (!feasible)
    throw argument_error("subgradient_projector: could not locate a feasible point");
  return MapSpec{SubgradientProjector{std::move(cuts), Point(std::move(x))}};
}

MapSpec averaged_map(MapSpec inner, double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw argument_error("averaged_map: lambda must lie in (0,1)");
  return MapSpec{AveragedMap{std::make_shared<const MapSpec>(std::move(inner)), lambda}};
}

MapSpec composition(std::vector<MapSpec> stages) {
  if (stages.empty()) throw argument_error("composition: need at least one stage");
  const std::size_t d = map_dim(stages[0]);
  const SpaceSpec eu = SpaceSpec::euclidean(d);
  for (const auto& s : stages) require_same_dim(map_dim(s), d, "composition");

  // Krasnoselskii iteration on the composed map finds a common fixed point
  // when the stage fixed sets intersect
  Point x = map_witness(stages[0]);
  for (int it = 0; it < 200000; ++it) {
    bool all = true;
    for (const auto& s : stages)
      if (fixed_point_residual(eu, s, x) > 1e-12) all = false;
    if (all) {
      std::vector<MapSpec> moved = std::move(stages);
      return MapSpec{Composition{std::move(moved), std::move(x)}};
    }
    Point tx = x;
    for (const auto& s : stages) tx = apply_map(eu, s, tx);
    std::vector<double> half(d);
    K().axpby(half.data(), 0.5, x.data(), 0.5, tx.data(), d);
    x = Point(std::move(half));
  }
  throw argument_error("composition: stage fixed sets do not appear to intersect");
}

const char* map_kind_name(const MapSpec& map) {
  return std::visit(
      overloaded{[](const HalfspaceProjection&) { return "halfspace"; },
                 [](const BallProjection&) { return "ball"; },
                 [](const BoxProjection&) { return "box"; },
                 [](const AffineProjection&) { return "affine"; },
                 [](const PlaneRotation&) { return "rotation"; },
                 [](const SubgradientProjector&) { return "subgradient"; },
                 [](const AveragedMap&) { return "averaged"; },
                 [](const Composition&) { return "composition"; }},
      map.v);
}

std::size_t map_dim(const MapSpec& map) {
  return std::visit(
      overloaded{[](const HalfspaceProjection& m) { return m.h.a.dim(); },
                 [](const BallProjection& m) { return m.center.dim(); },
                 [](const BoxProjection& m) { return m.lo.dim(); },
                 [](const AffineProjection& m) { return m.rows[0].dim(); },
                 [](const PlaneRotation&) { return std::size_t{2}; },
                 [](const SubgradientProjector& m) { return m.cuts[0].a.dim(); },
                 [](const AveragedMap& m) { return map_dim(*m.inner); },
                 [](const Composition& m) { return map_dim(m.stages[0]); }},
      map.v);
}

bool map_is_lp_safe(const MapSpec& map) {
  return std::visit(
      overloaded{[](const BoxProjection&) { return true; },
                 [](const AveragedMap& m) { return map_is_lp_safe(*m.inner); },
                 [](const Composition& m) {
                   return std::all_of(m.stages.begin(), m.stages.end(),
                                      [](const MapSpec& s) { return map_is_lp_safe(s); });
                 },
                 [](const auto&) { return false; }},
      map.v);
}

void validate_map(const SpaceSpec& space, const MapSpec& map) {
  require_same_dim(map_dim(map), space.dim, "validate_map");
  if (std::holds_alternative<PlaneRotation>(map.v) && space.dim != 2)
    throw argument_error("rotation maps require a two-dimensional space");
  if (!space.is_euclidean() && !map_is_lp_safe(map))
    throw validation_error(std::string("map kind '") + map_kind_name(map) +
                           "' is only quasi-nonexpansive in the Euclidean norm; "
                           "lp-space runs accept componentwise maps only");
}

Point apply_map(const SpaceSpec& space, const MapSpec& map, const Point& x) {
  require_same_dim(map_dim(map), space.dim, "apply_map");
  require_same_dim(x.dim(), space.dim, "apply_map");
  const std::size_t d = x.dim();
  return std::visit(
      overloaded{
          [&](const HalfspaceProjection& m) { return project_halfspace(m, x); },
          [&](const BallProjection& m) {
            const double dist = norm_diff(SpaceSpec::euclidean(d), x, m.center);
            if (dist <= m.radius) return x;
            const double t = m.radius / dist;
            std::vector<double> out(d);
            K().axpby(out.data(), 1.0 - t, m.center.data(), t, x.data(), d);
            return Point(std::move(out));
          },
          [&](const BoxProjection& m) {
            std::vector<double> out(d);
            K().clamp(out.data(), x.data(), m.lo.data(), m.hi.data(), d);
            return Point(std::move(out));
          },
          [&](const AffineProjection& m) {
            const std::size_t rows = m.rows.size();
            std::vector<double> res(rows);
            for (std::size_t i = 0; i < rows; ++i)
              res[i] = K().dot(m.rows[i].data(), x.data(), d) - m.rhs[i];
            std::vector<double> coef(rows, 0.0);
            for (std::size_t i = 0; i < rows; ++i)
              for (std::size_t j = 0; j < rows; ++j) coef[i] += m.gram_pinv[i * rows + j] * res[j];
            std::vector<double> out(x.coords());
            for (std::size_t i = 0; i < rows; ++i)
              K().axpy(out.data(), -coef[i], m.rows[i].data(), d);
            return Point(std::move(out));
          },
          [&](const PlaneRotation& m) {
            return Point({m.c * x[0] - m.s * x[1], m.s * x[0] + m.c * x[1]});
          },
          [&](const SubgradientProjector& m) {
            double worst = 0.0;
            std::size_t arg = 0;
            for (std::size_t j = 0; j < m.cuts.size(); ++j) {
              const double viol = m.cuts[j].violation(x);
              if (viol > worst) {
                worst = viol;
                arg = j;
              }
            }
            if (worst <= 0.0) return x;
            const Point& g = m.cuts[arg].a;
            std::vector<double> out(x.coords());
            K().axpy(out.data(), -worst / K().sumsq(g.data(), d), g.data(), d);
            return Point(std::move(out));
          },
          [&](const AveragedMap& m) {
            const Point tx = apply_map(space, *m.inner, x);
            std::vector<double> out(d);
            K().axpby(out.data(), 1.0 - m.lambda, x.data(), m.lambda, tx.data(), d);
            return Point(std::move(out));
          },
          [&](const Composition& m) {
            Point y = x;
            for (const auto& s : m.stages) y = apply_map(space, s, y);
            return y;
          }},
      map.v);
}

double fixed_point_residual(const SpaceSpec& space, const MapSpec& map, const Point& x) {
  return norm_diff(space, x, apply_map(space, map, x));
}

bool in_fixed_set(const MapSpec& map, const Point& x, double tol) {
  const std::size_t d = x.dim();
  require_same_dim(map_dim(map), d, "in_fixed_set");
  return std::visit(
      overloaded{
          [&](const HalfspaceProjection& m) { return m.h.violation(x) <= tol; },
          [&](const BallProjection& m) {
            return norm_diff(SpaceSpec::euclidean(d), x, m.center) <= m.radius + tol;
          },
          [&](const BoxProjection& m) {
            for (std::size_t i = 0; i < d; ++i)
              if (x[i] < m.lo[i] - tol || x[i] > m.hi[i] + tol) return false;
            return true;
          },
          [&](const AffineProjection& m) {
            for (std::size_t i = 0; i < m.rows.size(); ++i)
              if (std::fabs(K().dot(m.rows[i].data(), x.data(), d) - m.rhs[i]) > tol) return false;
            return true;
          },
          [&](const PlaneRotation& m) {
            if (rotation_is_identity(m)) return true;
            return std::sqrt(K().sumsq(x.data(), d)) <= tol;
          },
          [&](const SubgradientProjector& m) {
            for (const auto& cut : m.cuts)
              if (cut.violation(x) > tol) return false;
            return true;
          },
          [&](const AveragedMap& m) { return in_fixed_set(*m.inner, x, tol); },
          [&](const Composition& m) {
            for (const auto& s : m.stages)
              if (!in_fixed_set(s, x, tol)) return false;
            return true;
          }},
      map.v);
}

Point map_witness(const MapSpec& map) {
  return std::visit(
      overloaded{
          [](const HalfspaceProjection& m) {
            std::vector<double> w(m.h.a.dim());
            K().scale(w.data(), m.h.b / m.normal_sumsq, m.h.a.data(), w.size());
            return Point(std::move(w));
          },
          [](const BallProjection& m) { return m.center; },
          [](const BoxProjection& m) { return m.lo; },
          [](const AffineProjection& m) { return m.least_norm; },
          [](const PlaneRotation&) { return Point::zeros(2); },
          [](const SubgradientProjector& m) { return m.witness; },
          [](const AveragedMap& m) { return map_witness(*m.inner); },
          [](const Composition& m) { return m.witness; }},
      map.v);
}

std::vector<MapSpec> fixed_set_projections(const MapSpec& map) {
  return std::visit(
      overloaded{
          [&](const HalfspaceProjection&) { return std::vector<MapSpec>{map}; },
          [&](const BallProjection&) { return std::vector<MapSpec>{map}; },
          [&](const BoxProjection&) { return std::vector<MapSpec>{map}; },
          [&](const AffineProjection&) { return std::vector<MapSpec>{map}; },
          [&](const PlaneRotation& m) {
            if (rotation_is_identity(m)) return std::vector<MapSpec>{};
            return std::vector<MapSpec>{box_projection(Point::zeros(2), Point::zeros(2))};
          },
          [&](const SubgradientProjector& m) {
            std::vector<MapSpec> out;
            for (const auto& cut : m.cuts) out.push_back(halfspace_projection(cut.a, cut.b));
            return out;
          },
          [&](const AveragedMap& m) { return fixed_set_projections(*m.inner); },
          [&](const Composition& m) {
            std::vector<MapSpec> out;
            for (const auto& s : m.stages)
              for (auto& piece : fixed_set_projections(s)) out.push_back(std::move(piece));
            return out;
          }},
      map.v);
}

// ---------------------------------------------------------------------------
// operators

OperatorSpec quadratic_subdifferential(Point center, double scale) {
  if (!(scale > 0.0)) throw argument_error("quadratic_subdifferential: scale must be positive");
  return OperatorSpec{QuadraticSubdifferential{std::move(center), scale}};
}

OperatorSpec l1_subdifferential(double weight) {
  if (!(weight > 0.0)) throw argument_error("l1_subdifferential: weight must be positive");
  return OperatorSpec{L1Subdifferential{weight}};
}

OperatorSpec indicator_subdifferential(MapSpec projection) {
  const bool ok = std::visit(
      overloaded{[](const HalfspaceProjection&) { return true; },
                 [](const BallProjection&) { return true; },
                 [](const BoxProjection&) { return true; },
                 [](const AffineProjection&) { return true; },
                 [](const auto&) { return false; }},
      projection.v);
  if (!ok)
    throw argument_error(
        "indicator_subdifferential: set must be given by a metric projection variant "
        "(halfspace, ball, box, affine)");
  return OperatorSpec{IndicatorSubdifferential{std::make_shared<const MapSpec>(std::move(projection))}};
}

OperatorSpec linear_psd(std::vector<Point> rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw argument_error("linear_psd: empty matrix");
  for (const auto& r : rows) require_same_dim(r.dim(), n, "linear_psd (square matrix)");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(rows[i][j] - rows[j][i]) > 1e-12)
        throw argument_error("linear_psd: matrix symmetry defect exceeds 1e-12");
  std::vector<double> flat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = rows[i][j];
  const dense::SymEigen eg = dense::sym_eigen(flat, n);
  if (eg.values.front() < -1e-12)
    throw argument_error("linear_psd: matrix has an eigenvalue below -1e-12");
  return OperatorSpec{LinearPsd{std::move(rows)}};
}

const char* operator_kind_name(const OperatorSpec& op) {
  return std::visit(
      overloaded{[](const QuadraticSubdifferential&) { return "quadratic"; },
                 [](const L1Subdifferential&) { return "l1"; },
                 [](const IndicatorSubdifferential&) { return "indicator"; },
                 [](const LinearPsd&) { return "linear_psd"; }},
      op.v);
}

std::size_t operator_dim(const OperatorSpec& op, std::size_t space_dim) {
  return std::visit(
      overloaded{[](const QuadraticSubdifferential& o) { return o.center.dim(); },
                 [&](const L1Subdifferential&) { return space_dim; },
                 [](const IndicatorSubdifferential& o) { return map_dim(*o.projection); },
                 [](const LinearPsd& o) { return o.rows.size(); }},
      op.v);
}

bool operator_is_lp_safe(const OperatorSpec& op) {
  return std::visit(
      overloaded{[](const QuadraticSubdifferential&) { return true; },
                 [](const L1Subdifferential&) { return true; },
                 [](const IndicatorSubdifferential& o) { return map_is_lp_safe(*o.projection); },
                 [](const LinearPsd&) { return false; }},
      op.v);
}

void validate_operator(const SpaceSpec& space, const OperatorSpec& op) {
  require_same_dim(operator_dim(op, space.dim), space.dim, "validate_operator");
  if (!space.is_euclidean() && !operator_is_lp_safe(op))
    throw validation_error(std::string("operator kind '") + operator_kind_name(op) +
                           "' is only accretive for the Euclidean pairing; "
                           "lp-space runs accept componentwise operators only");
}

Point resolvent(const SpaceSpec& space, const OperatorSpec& op, double r, const Point& x) {
  if (!(r > 0.0)) throw argument_error("resolvent scale must be positive");
  require_same_dim(x.dim(), space.dim, "resolvent");
  require_same_dim(operator_dim(op, space.dim), space.dim, "resolvent");
  const std::size_t d = x.dim();
  return std::visit(
      overloaded{
          [&](const QuadraticSubdifferential& o) {
            const double rs = r * o.scale;
            std::vector<double> out(d);
            K().axpby(out.data(), 1.0 / (1.0 + rs), x.data(), rs / (1.0 + rs), o.center.data(), d);
            return Point(std::move(out));
          },
          [&](const L1Subdifferential& o) {
            std::vector<double> out(d);
            K().soft_threshold(out.data(), x.data(), r * o.weight, d);
            return Point(std::move(out));
          },
          [&](const IndicatorSubdifferential& o) { return apply_map(space, *o.projection, x); },
          [&](const LinearPsd& o) {
            std::vector<double> a(d * d);
            for (std::size_t i = 0; i < d; ++i)
              for (std::size_t j = 0; j < d; ++j)
                a[i * d + j] = (i == j ? 1.0 : 0.0) + r * o.rows[i][j];
            return Point(dense::spd_solve(std::move(a), x.coords(), d));
          }},
      op.v);
}

bool in_zero_set(const OperatorSpec& op, const Point& x, double tol) {
  const std::size_t d = x.dim();
  return std::visit(
      overloaded{[&](const QuadraticSubdifferential& o) {
                   return norm_diff(SpaceSpec::euclidean(d), x, o.center) <= tol;
                 },
                 [&](const L1Subdifferential&) { return K().max_abs(x.data(), d) <= tol; },
                 [&](const IndicatorSubdifferential& o) {
                   return in_fixed_set(*o.projection, x, tol);
                 },
                 [&](const LinearPsd& o) {
                   for (std::size_t i = 0; i < d; ++i)
                     if (std::fabs(K().dot(o.rows[i].data(), x.data(), d)) > tol) return false;
                   return true;
                 }},
      op.v);
}

Point operator_witness(const OperatorSpec& op, std::size_t space_dim) {
  return std::visit(
      overloaded{[](const QuadraticSubdifferential& o) { return o.center; },
                 [&](const L1Subdifferential&) { return Point::zeros(space_dim); },
                 [](const IndicatorSubdifferential& o) { return map_witness(*o.projection); },
                 [](const LinearPsd& o) { return Point::zeros(o.rows.size()); }},
      op.v);
}

std::vector<MapSpec> zero_set_projections(const OperatorSpec& op, std::size_t space_dim) {
  return std::visit(
      overloaded{[](const QuadraticSubdifferential& o) {
                   return std::vector<MapSpec>{box_projection(o.center, o.center)};
                 },
                 [&](const L1Subdifferential&) {
                   return std::vector<MapSpec>{
                       box_projection(Point::zeros(space_dim), Point::zeros(space_dim))};
                 },
                 [](const IndicatorSubdifferential& o) {
                   return std::vector<MapSpec>{*o.projection};
                 },
                 [](const LinearPsd& o) {
                   return std::vector<MapSpec>{
                       affine_projection(o.rows, std::vector<double>(o.rows.size(), 0.0))};
                 }},
      op.v);
}

double resolvent_identity_defect(const SpaceSpec& space, const OperatorSpec& op, const Point& a,
                                 double k, double l) {
  if (!(k > 0.0) || !(l > 0.0))
    throw argument_error("resolvent_identity_defect: scales must be positive");
  const Point jk = resolvent(space, op, k, a);
  const Point jl = resolvent(space, op, l, a);
  return norm_diff(space, jk, jl) - std::fabs(k - l) / k * norm_diff(space, a, jk);
}

Point family_combination(const SpaceSpec& space, std::span<const double> weights,
                         const Point& base, std::span<const Point> images) {
  if (weights.empty() || images.size() + 1 != weights.size())
    throw argument_error("family_combination: need |images| = |weights| - 1");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw argument_error("family_combination: weights must be nonnegative");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw argument_error("family_combination: weights must sum to 1");
  require_same_dim(base.dim(), space.dim, "family_combination");
  std::vector<double> acc(space.dim);
  K().scale(acc.data(), weights[0], base.data(), space.dim);
  for (std::size_t i = 0; i < images.size(); ++i) {
    require_same_dim(images[i].dim(), space.dim, "family_combination");
    K().axpy(acc.data(), weights[i + 1], images[i].data(), space.dim);
  }
  return Point(std::move(acc));
}

double combination_inequality_defect(const SpaceSpec& space, std::span<const double> weights,
                                     std::span<const Point> points, std::size_t k, std::size_t l) {
  if (!space.is_euclidean())
    throw argument_error("combination_inequality_defect: Euclidean space only");
  if (weights.size() != points.size() || weights.size() < 2)
    throw argument_error("combination_inequality_defect: need matching weights/points, size >= 2");
  if (k >= weights.size() || l >= weights.size() || k == l)
    throw argument_error("combination_inequality_defect: invalid index pair");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !(w < 1.0))
      throw argument_error("combination_inequality_defect: weights must lie in (0,1)");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw argument_error("combination_inequality_defect: weights must sum to 1");

  const std::size_t d = space.dim;
  std::vector<double> acc(d, 0.0);
  double bracket = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_same_dim(points[i].dim(), d, "combination_inequality_defect");
    K().axpy(acc.data(), weights[i], points[i].data(), d);
    bracket += weights[i] * K().sumsq(points[i].data(), d);
  }
  bracket -= weights[k] * weights[l] * K().diff_sumsq(points[k].data(), points[l].data(), d);
  return K().sumsq(acc.data(), d) - bracket;
}

}  // namespace fixpoint
