#include "fixpoint/engine.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "fixpoint/errors.hpp"
#include "fixpoint/kernels.hpp"

namespace fixpoint {

namespace {

const kernels::Backend& K() { return kernels::active(); }

constexpr double kDivergenceLimit = 1e12;

void require_finite(const std::vector<double>& x, std::size_t step) {
  for (double c : x)
    if (!std::isfinite(c) || std::fabs(c) > kDivergenceLimit)
      throw divergence_error("iterate diverged at step " + std::to_string(step), step);
}

// the three coefficients must reassemble into 1; guards schedule evaluation
void require_convex_identity(double xi, double zeta) {
  const double s = xi + (1.0 - zeta) + (zeta - xi);
  if (std::fabs(s - 1.0) > 1e-14)
    throw std::logic_error("convex combination identity violated by schedule values");
}

double sq_dist(const SpaceSpec& space, const Point& x, const Point& z) {
  (void)space;
  return K().diff_sumsq(x.data(), z.data(), x.dim());
}

// defect of ||v1-z||^2 <= (1-xi)||v0-z||^2 + 2 xi <u-z, v1-z>
double step2_defect_value(const Point& v0, const Point& v1, const Point& u, const Point& z,
                          double xi) {
  const std::size_t d = v0.dim();
  double ip = 0.0;
  for (std::size_t i = 0; i < d; ++i) ip += (u[i] - z[i]) * (v1[i] - z[i]);
  const double d0 = K().diff_sumsq(v0.data(), z.data(), d);
  const double d1 = K().diff_sumsq(v1.data(), z.data(), d);
  return d1 - (1.0 - xi) * d0 - 2.0 * xi * ip;
}

struct FamilyDriver {
  std::string scheme;
  std::size_t M = 0;
  // i = 0..M; images of the current iterate under T_i at step n
  std::function<Point(std::size_t n, std::size_t i, const Point&)> apply;
  std::function<std::vector<double>(std::size_t n)> row;  // weights, size M+1
};

Trace run_family(const SpaceSpec& space, const Point& u, const Point& v1,
                 const FamilyDriver& fam, const ScheduleSpec& xi_s, const ScheduleSpec& zeta_s,
                 const StopRule& stop, const RunOptions& opt) {
  stop.validate();
  if (u.dim() != space.dim || v1.dim() != space.dim)
    throw argument_error("anchor/start dimension does not match the space");
  if (stop.target_tol && opt.target == nullptr)
    throw argument_error("target_tol is set but no oracle target was supplied");
  if (opt.target && opt.target->dim() != space.dim)
    throw argument_error("oracle target dimension does not match the space");

  Trace tr;
  tr.meta.scheme = fam.scheme;
  tr.meta.space = space;
  tr.meta.u = u;

  const std::size_t M = fam.M;
  const bool step2 = opt.target != nullptr && space.is_euclidean();
  Point v = v1;
  std::vector<Point> images;
  images.reserve(M + 1);

  const auto state_residuals = [&](std::size_t n, const Point& x, std::vector<Point>* keep) {
    std::vector<double> res(M + 1);
    if (keep) keep->clear();
    for (std::size_t i = 0; i <= M; ++i) {
      Point img = fam.apply(n, i, x);
      res[i] = norm_diff(space, x, img);
      if (keep) keep->push_back(std::move(img));
    }
    return res;
  };
  const auto final_record = [&](std::size_t n, const Point& x, std::vector<double> res,
                               std::optional<double> dist, Outcome oc) {
    tr.records.push_back(TraceRecord{n, x, 0.0, std::move(res), 0.0, dist, std::nullopt});
    tr.outcome = oc;
  };

  for (std::size_t n = 0;; ++n) {
    const std::vector<double> res = state_residuals(n, v, &images);
    double max_res = 0.0;
    for (double ri : res) max_res = std::max(max_res, ri);
    std::optional<double> dist;
    if (opt.target) dist = norm_diff(space, v, *opt.target);

    if (stop.residual_tol && max_res <= *stop.residual_tol) {
      final_record(n, v, res, dist, Outcome::ConvergedResidual);
      break;
    }
    if (stop.target_tol && dist && *dist <= *stop.target_tol) {
      final_record(n, v, res, dist, Outcome::ConvergedTarget);
      break;
    }
    if (n >= stop.max_iters) {
      final_record(n, v, res, dist, Outcome::MaxIters);
      break;
    }

    const double xi = xi_s.eval(n);
    const double zeta = zeta_s.eval(n);
    require_convex_identity(xi, zeta);
    std::vector<double> wrow = fam.row(n);

    const Point w = family_combination(space, wrow, v,
                                       std::span<const Point>(images.data() + 1, M));
    const double w_gap = norm_diff(space, w, v);
    const Point t0w = fam.apply(n, 0, w);

    std::vector<double> next(space.dim);
    K().lincomb3(next.data(), xi, u.data(), 1.0 - zeta, images[0].data(), zeta - xi, t0w.data(),
                 space.dim);
    require_finite(next, n);
    Point v_next(std::move(next));

    const double step = norm_diff(space, v_next, v);
    std::optional<double> defect;
    if (step2) defect = step2_defect_value(v, v_next, u, *opt.target, xi);

    tr.records.push_back(TraceRecord{n, v, step, res, w_gap, dist, defect});
    tr.meta.xi.push_back(xi);
    tr.meta.zeta.push_back(zeta);
    tr.meta.weight_rows.push_back(std::move(wrow));

    if (stop.step_tol && step <= *stop.step_tol) {
      const std::vector<double> res2 = state_residuals(n + 1, v_next, nullptr);
      std::optional<double> dist2;
      if (opt.target) dist2 = norm_diff(space, v_next, *opt.target);
      final_record(n + 1, v_next, res2, dist2, Outcome::ConvergedStep);
      break;
    }
    v = std::move(v_next);
  }
  return tr;
}

}  // namespace

void StopRule::validate() const {
  if (max_iters == 0) throw argument_error("stop rule: max_iters must be positive");
  for (const auto& [name, tol] :
       {std::pair<const char*, const std::optional<double>&>{"residual_tol", residual_tol},
        {"step_tol", step_tol},
        {"target_tol", target_tol}})
    if (tol && !(*tol > 0.0))
      throw argument_error(std::string("stop rule: ") + name + " must be positive");
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ConvergedResidual:
      return "converged_residual";
    case Outcome::ConvergedStep:
      return "converged_step";
    case Outcome::ConvergedTarget:
      return "converged_target";
    case Outcome::MaxIters:
      return "max_iters";
  }
  return "max_iters";
}

Trace run_itnew(const SpaceSpec& space, const Point& u, const Point& v1,
                const std::vector<MapSpec>& maps, const ScheduleSpec& xi,
                const ScheduleSpec& zeta, const FamilyWeights& weights, const StopRule& stop,
                const RunOptions& opt) {
  if (maps.size() != weights.M + 1)
    throw argument_error("map list must have M+1 entries matching the weight rule");
  for (const auto& m : maps) validate_map(space, m);

  const ConditionReport rep = validate_theorem_conditions(xi, zeta, weights);
  if (!rep.all_hold() && !opt.skip_validation)
    throw validation_error("scheme preconditions not satisfied: " + rep.summary());

  FamilyDriver fam;
  fam.scheme = "itnew";
  fam.M = weights.M;
  fam.apply = [&](std::size_t, std::size_t i, const Point& x) {
    return apply_map(space, maps[i], x);
  };
  fam.row = [&](std::size_t) { return weights.row(); };
  return run_family(space, u, v1, fam, xi, zeta, stop, opt);
}

Trace run_resolvent_scheme(const SpaceSpec& space, const Point& u, const Point& v1,
                           const std::vector<OperatorSpec>& ops, const ResolventScaleSchedule& r,
                           const ScheduleSpec& xi, const ScheduleSpec& zeta,
                           const FamilyWeights& weights, const StopRule& stop,
                           const RunOptions& opt) {
  if (ops.size() != weights.M + 1)
    throw argument_error("operator list must have M+1 entries matching the weight rule");
  for (const auto& op : ops) validate_operator(space, op);

  const ConditionReport rep = validate_theorem_conditions(xi, zeta, weights);
  if (!rep.all_hold() && !opt.skip_validation)
    throw validation_error("scheme preconditions not satisfied: " + rep.summary());

  FamilyDriver fam;
  fam.scheme = "res";
  fam.M = weights.M;
  fam.apply = [&](std::size_t n, std::size_t i, const Point& x) {
    return resolvent(space, ops[i], r.eval(n), x);
  };
  fam.row = [&](std::size_t) { return weights.row(); };
  return run_family(space, u, v1, fam, xi, zeta, stop, opt);
}

Trace run_corollary_single(const SpaceSpec& space, const Point& u, const Point& v1,
                           const MapSpec& T, const ScheduleSpec& xi, const ScheduleSpec& zeta,
                           const ScheduleSpec& phi, const StopRule& stop, const RunOptions& opt) {
  validate_map(space, T);
  const ConditionReport rep = validate_corollary(xi, zeta, phi);
  if (!rep.all_hold() && !opt.skip_validation)
    throw validation_error("scheme preconditions not satisfied: " + rep.summary());

  FamilyDriver fam;
  fam.scheme = "corollary";
  fam.M = 1;
  fam.apply = [&](std::size_t, std::size_t, const Point& x) { return apply_map(space, T, x); };
  fam.row = [&](std::size_t n) {
    const double p = phi.eval(n);
    return std::vector<double>{1.0 - p, p};
  };
  return run_family(space, u, v1, fam, xi, zeta, stop, opt);
}

Trace run_halpern(const SpaceSpec& space, const Point& u, const Point& a0, const MapSpec& T,
                  const ScheduleSpec& phi, const StopRule& stop, const RunOptions& opt) {
  stop.validate();
  validate_map(space, T);
  if (u.dim() != space.dim || a0.dim() != space.dim)
    throw argument_error("anchor/start dimension does not match the space");
  if (stop.target_tol && opt.target == nullptr)
    throw argument_error("target_tol is set but no oracle target was supplied");
  if (opt.target && opt.target->dim() != space.dim)
    throw argument_error("oracle target dimension does not match the space");

  const ConditionReport rep = validate_halpern(phi);
  const ConditionEntry* c1 = rep.find("C1");
  const ConditionEntry* c2 = rep.find("C2");
  const bool ok = c1 && c2 && c1->verdict == Verdict::Holds && c2->verdict == Verdict::Holds;
  if (!ok && !opt.skip_validation)
    throw validation_error("anchor schedule fails C1/C2: " + rep.summary());

  Trace tr;
  tr.meta.scheme = "halpern";
  tr.meta.space = space;
  tr.meta.u = u;

  const bool step2 = opt.target != nullptr && space.is_euclidean();
  Point a = a0;
  for (std::size_t n = 0;; ++n) {
    Point ta = apply_map(space, T, a);
    const double res = norm_diff(space, a, ta);
    std::optional<double> dist;
    if (opt.target) dist = norm_diff(space, a, *opt.target);

    if (stop.residual_tol && res <= *stop.residual_tol) {
      tr.records.push_back(TraceRecord{n, a, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::ConvergedResidual;
      break;
    }
    if (stop.target_tol && dist && *dist <= *stop.target_tol) {
      tr.records.push_back(TraceRecord{n, a, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::ConvergedTarget;
      break;
    }
    if (n >= stop.max_iters) {
      tr.records.push_back(TraceRecord{n, a, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::MaxIters;
      break;
    }

    const double p = phi.eval(n);
    std::vector<double> next(space.dim);
    K().axpby(next.data(), p, u.data(), 1.0 - p, ta.data(), space.dim);
    require_finite(next, n);
    Point a_next(std::move(next));

    const double step = norm_diff(space, a_next, a);
    std::optional<double> defect;
    if (step2) defect = step2_defect_value(a, a_next, u, *opt.target, p);

    tr.records.push_back(TraceRecord{n, a, step, {res}, 0.0, dist, defect});
    tr.meta.xi.push_back(p);

    if (stop.step_tol && step <= *stop.step_tol) {
      const Point ta2 = apply_map(space, T, a_next);
      std::optional<double> dist2;
      if (opt.target) dist2 = norm_diff(space, a_next, *opt.target);
      tr.records.push_back(TraceRecord{
          n + 1, a_next, 0.0, {norm_diff(space, a_next, ta2)}, 0.0, dist2, std::nullopt});
      tr.outcome = Outcome::ConvergedStep;
      break;
    }
    a = std::move(a_next);
  }
  return tr;
}

Trace run_dk(const SpaceSpec& space, const Point& x0, const MapSpec& T, const ScheduleSpec& wp,
             const ScheduleSpec& xi, const ScheduleSpec& zeta, const StopRule& stop,
             const RunOptions& opt) {
  stop.validate();
  validate_map(space, T);
  if (x0.dim() != space.dim) throw argument_error("start dimension does not match the space");
  if (stop.target_tol && opt.target == nullptr)
    throw argument_error("target_tol is set but no oracle target was supplied");
  if (opt.target && opt.target->dim() != space.dim)
    throw argument_error("oracle target dimension does not match the space");

  const ConditionReport rep = validate_dk(wp, xi, zeta);
  if (!rep.all_hold() && !opt.skip_validation)
    throw validation_error("scheme preconditions not satisfied: " + rep.summary());

  Trace tr;
  tr.meta.scheme = "dk";
  tr.meta.space = space;
  tr.meta.u = x0;

  Point x = x0;
  for (std::size_t n = 0;; ++n) {
    Point tx = apply_map(space, T, x);
    const double res = norm_diff(space, x, tx);
    std::optional<double> dist;
    if (opt.target) dist = norm_diff(space, x, *opt.target);

    if (stop.residual_tol && res <= *stop.residual_tol) {
      tr.records.push_back(TraceRecord{n, x, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::ConvergedResidual;
      break;
    }
    if (stop.target_tol && dist && *dist <= *stop.target_tol) {
      tr.records.push_back(TraceRecord{n, x, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::ConvergedTarget;
      break;
    }
    if (n >= stop.max_iters) {
      tr.records.push_back(TraceRecord{n, x, 0.0, {res}, 0.0, dist, std::nullopt});
      tr.outcome = Outcome::MaxIters;
      break;
    }

    const double p = wp.eval(n);
    const double q = xi.eval(n);
    const double s = zeta.eval(n);
    require_convex_identity(q, p);

    std::vector<double> ybuf(space.dim);
    K().axpby(ybuf.data(), 1.0 - s, x.data(), s, tx.data(), space.dim);
    Point y(std::move(ybuf));
    const double w_gap = norm_diff(space, y, x);
    const Point ty = apply_map(space, T, y);

    std::vector<double> next(space.dim);
    K().lincomb3(next.data(), 1.0 - p, x.data(), q, tx.data(), p - q, ty.data(), space.dim);
    require_finite(next, n);
    Point x_next(std::move(next));

    const double step = norm_diff(space, x_next, x);
    tr.records.push_back(TraceRecord{n, x, step, {res}, w_gap, dist, std::nullopt});
    tr.meta.xi.push_back(q);
    tr.meta.zeta.push_back(p);

    if (stop.step_tol && step <= *stop.step_tol) {
      const Point tx2 = apply_map(space, T, x_next);
      std::optional<double> dist2;
      if (opt.target) dist2 = norm_diff(space, x_next, *opt.target);
      tr.records.push_back(TraceRecord{
          n + 1, x_next, 0.0, {norm_diff(space, x_next, tx2)}, 0.0, dist2, std::nullopt});
      tr.outcome = Outcome::ConvergedStep;
      break;
    }
    x = std::move(x_next);
  }
  return tr;
}

double check_step1_bound(const Trace& trace, const Point& u, const Point& v1, const Point& p) {
  const SpaceSpec& space = trace.meta.space;
  const double bound = std::max(norm_diff(space, u, p), norm_diff(space, v1, p));
  double defect = -bound;  // value at an iterate equal to p
  for (const auto& rec : trace.records)
    defect = std::max(defect, norm_diff(space, rec.v, p) - bound);
  return defect;
}

double check_step2_recursion(const Trace& trace, const Point& u, const Point& z) {
  const SpaceSpec& space = trace.meta.space;
  if (!space.is_euclidean())
    throw argument_error("step-2 recursion check is only available in Euclidean space");
  if (trace.records.size() < 2) return 0.0;
  const std::size_t transitions = trace.records.size() - 1;
  if (trace.meta.xi.size() < transitions)
    throw argument_error("trace does not carry anchor coefficients for every transition");

  double defect = -1.0;
  for (std::size_t t = 0; t < transitions; ++t)
    defect = std::max(defect, step2_defect_value(trace.records[t].v, trace.records[t + 1].v, u, z,
                                                 trace.meta.xi[t]));
  return defect;
}

double check_residual_bound(const Trace& trace, const Point& z, const ScheduleSpec& xi,
                            const ScheduleSpec& zeta, const FamilyWeights& weights, double K) {
  const SpaceSpec& space = trace.meta.space;
  if (!space.is_euclidean())
    throw argument_error("residual bound check is only available in Euclidean space");
  if (trace.records.size() < 2) return 0.0;

  const std::size_t M = weights.M;
  double defect = -1.0;
  for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
    const double dn = sq_dist(space, trace.records[t].v, z);
    const double dn1 = sq_dist(space, trace.records[t + 1].v, z);
    const double rhs = dn - dn1 + xi.eval(t) * K;
    if (M == 0) {
      defect = std::max(defect, -rhs);
      continue;
    }
    const auto& res = trace.records[t].residuals;
    if (res.size() != M + 1)
      throw argument_error("trace residual arity does not match the weight rule");
    for (std::size_t i = 1; i <= M; ++i) {
      const double lhs = zeta.eval(t) * weights.phi(0) * weights.phi(i) * res[i] * res[i];
      defect = std::max(defect, lhs - rhs);
    }
  }
  return defect;
}

double residual_bound_constant(const Trace& trace, const Point& u, const Point& z,
                               const FamilyWeights& weights) {
  const SpaceSpec& space = trace.meta.space;
  if (!space.is_euclidean())
    throw argument_error("residual bound constant is only available in Euclidean space");
  const double uz = sq_dist(space, u, z);
  double K = 0.0;
  for (const auto& rec : trace.records) {
    double term = std::fabs(uz - sq_dist(space, rec.v, z));
    if (weights.M > 0 && rec.residuals.size() == weights.M + 1) {
      double worst = 0.0;
      for (std::size_t i = 1; i <= weights.M; ++i)
        worst = std::max(worst,
                         weights.phi(0) * weights.phi(i) * rec.residuals[i] * rec.residuals[i]);
      term += worst;
    }
    K = std::max(K, term);
  }
  return K;
}

DecayVerdict decay_recursion_verdict(std::span<const double> mu, std::span<const double> phi,
                                     std::span<const double> eps, double tol,
                                     std::size_t window) {
  if (mu.empty()) throw argument_error("decay verdict: empty sequence");
  const std::size_t steps = mu.size() - 1;
  if (phi.size() < steps || eps.size() < steps)
    throw argument_error("decay verdict: phi/eps must cover every transition");
  for (std::size_t n = 0; n < steps; ++n) {
    const double rhs = (1.0 - phi[n]) * mu[n] + phi[n] * eps[n];
    if (mu[n + 1] > rhs + 1e-12)
      throw argument_error("decay verdict: recursion hypothesis violated at n=" +
                           std::to_string(n));
  }
  std::size_t w = window != 0 ? window : std::max<std::size_t>(1, mu.size() / 10);
  w = std::min(w, mu.size());
  double tail = 0.0;
  for (std::size_t i = mu.size() - w; i < mu.size(); ++i) tail = std::max(tail, mu[i]);
  return DecayVerdict{tail, tail <= tol};
}

}  // namespace fixpoint
