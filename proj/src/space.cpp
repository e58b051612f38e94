#include "fixpoint/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fixpoint/errors.hpp"
#include "fixpoint/kernels.hpp"

namespace fixpoint {

namespace {

void require_dim(const SpaceSpec& space, const Point& x, const char* what) {
  if (x.dim() != space.dim)
    throw argument_error(std::string(what) + ": point dimension " + std::to_string(x.dim()) +
                         " does not match space dimension " + std::to_string(space.dim));
}

double lp_norm(double p, std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += std::pow(std::fabs(xi), p);
  return std::pow(s, 1.0 / p);
}

double raw_norm(const SpaceSpec& space, std::span<const double> x) {
  if (space.is_euclidean()) return std::sqrt(kernels::active().sumsq(x.data(), x.size()));
  return lp_norm(space.p, x);
}

}  // namespace

Point::Point(std::vector<double> coords) : c_(std::move(coords)) {
  for (double v : c_)
    if (!std::isfinite(v)) throw argument_error("point entry is not finite");
}

Point Point::zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

SpaceSpec SpaceSpec::euclidean(std::size_t dim) {
  if (dim == 0) throw argument_error("space dimension must be positive");
  return {Kind::Euclidean, dim, 2.0};
}

SpaceSpec SpaceSpec::lp(double p, std::size_t dim) {
  if (dim == 0) throw argument_error("space dimension must be positive");
  if (!(p > 1.0) || !std::isfinite(p))
    throw argument_error("lp exponent must satisfy 1 < p < inf");
  return {Kind::Lp, dim, p};
}

GaugeSpec GaugeSpec::identity() { return {Form::Identity, 1.0}; }

GaugeSpec GaugeSpec::power(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw argument_error("gauge exponent must satisfy q >= 1");
  return {Form::Power, q};
}

double GaugeSpec::value(double t) const {
  if (t < 0.0) throw argument_error("gauge argument must be nonnegative");
  return form == Form::Identity ? t : std::pow(t, q);
}

double GaugeSpec::primitive(double t) const {
  if (t < 0.0) throw argument_error("gauge argument must be nonnegative");
  return form == Form::Identity ? 0.5 * t * t : std::pow(t, q + 1.0) / (q + 1.0);
}

double gauge_primitive(const GaugeSpec& gauge, double t) { return gauge.primitive(t); }

double norm(const SpaceSpec& space, const Point& x) {
  require_dim(space, x, "norm");
  return raw_norm(space, x.span());
}

double norm_diff(const SpaceSpec& space, const Point& x, const Point& y) {
  require_dim(space, x, "norm_diff");
  require_dim(space, y, "norm_diff");
  if (space.is_euclidean())
    return std::sqrt(kernels::active().diff_sumsq(x.data(), y.data(), x.dim()));
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += std::pow(std::fabs(x[i] - y[i]), space.p);
  return std::pow(s, 1.0 / space.p);
}

double pairing(const Point& f, const Point& x) {
  if (f.dim() != x.dim()) throw argument_error("pairing: dimension mismatch");
  return kernels::active().dot(f.data(), x.data(), x.dim());
}

Point duality_map(const SpaceSpec& space, const Point& x) {
  require_dim(space, x, "duality_map");
  if (space.is_euclidean()) return x;
  const double nx = norm(space, x);
  if (nx == 0.0) return Point::zeros(x.dim());
  const double s = std::pow(nx, 2.0 - space.p);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    out[i] = s * std::pow(std::fabs(x[i]), space.p - 1.0) * (x[i] < 0.0 ? -1.0 : (x[i] > 0.0 ? 1.0 : 0.0));
  return Point(std::move(out));
}

Point gauge_duality_map(const SpaceSpec& space, const GaugeSpec& gauge, const Point& x) {
  require_dim(space, x, "gauge_duality_map");
  const double nx = norm(space, x);
  if (nx == 0.0) return Point::zeros(x.dim());
  const Point j = duality_map(space, x);
  const double s = gauge.value(nx) / nx;
  std::vector<double> out(x.dim());
  kernels::active().scale(out.data(), s, j.data(), x.dim());
  return Point(std::move(out));
}

double norm_inequality_defect(const SpaceSpec& space, const Point& a, const Point& b) {
  require_dim(space, a, "norm_inequality_defect");
  require_dim(space, b, "norm_inequality_defect");
  std::vector<double> sum(a.dim());
  kernels::active().axpby(sum.data(), 1.0, a.data(), 1.0, b.data(), a.dim());
  const Point s(std::move(sum));
  const double ns = norm(space, s);
  const double na = norm(space, a);
  return ns * ns - na * na - 2.0 * pairing(b, duality_map(space, s));
}

double gauge_norm_inequality_defect(const SpaceSpec& space, const GaugeSpec& gauge,
                                    const Point& a, const Point& b) {
  require_dim(space, a, "gauge_norm_inequality_defect");
  require_dim(space, b, "gauge_norm_inequality_defect");
  std::vector<double> sum(a.dim());
  kernels::active().axpby(sum.data(), 1.0, a.data(), 1.0, b.data(), a.dim());
  const Point s(std::move(sum));
  return gauge.primitive(norm(space, s)) - gauge.primitive(norm(space, a)) -
         pairing(b, gauge_duality_map(space, gauge, s));
}

// ---------------------------------------------------------------------------
// geometry probes

namespace {

// Admissible pairs for the convexity modulus are parametrized by midpoint
// direction m and half-chord h = (eps/2) hdir: a = t m + h, b = t m - h has
// ||a-b|| = eps exactly, and the largest t with max(||a||,||b||) <= 1 gives
// the flattest admissible pair for that direction choice. The objective is
// then 1 - t.
double chord_value(const SpaceSpec& space, const std::vector<double>& mdir,
                   const std::vector<double>& hdir, double eps) {
  const std::size_t d = space.dim;
  std::vector<double> h(d), plus(d), minus(d);
  kernels::active().scale(h.data(), 0.5 * eps, hdir.data(), d);
  auto extreme = [&](double t) {
    kernels::active().axpby(plus.data(), t, mdir.data(), 1.0, h.data(), d);
    kernels::active().axpby(minus.data(), t, mdir.data(), -1.0, h.data(), d);
    return std::max(raw_norm(space, plus), raw_norm(space, minus));
  };
  if (extreme(0.0) >= 1.0) return 1.0;
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (extreme(mid) <= 1.0 ? lo : hi) = mid;
  }
  return 1.0 - lo;
}

// Unit vector in the space norm from a gaussian draw.
std::vector<double> random_unit(const SpaceSpec& space, std::mt19937_64& rng,
                                std::normal_distribution<double>& gauss) {
  std::vector<double> v(space.dim);
  for (;;) {
    for (auto& vi : v) vi = gauss(rng);
    const double n = raw_norm(space, v);
    if (n > 1e-9) {
      for (auto& vi : v) vi /= n;
      return v;
    }
  }
}

std::vector<double> axis(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  return v;
}

}  // namespace

double convexity_modulus_estimate(const SpaceSpec& space, double eps, std::size_t samples,
                                  std::uint64_t seed) {
  if (!(eps >= 0.0) || !(eps <= 2.0))
    throw argument_error("convexity modulus argument must lie in [0, 2]");
  if (eps == 0.0) return 0.0;

  double best = 1.0;
  const std::size_t axes = std::min<std::size_t>(space.dim, 4);
  for (std::size_t i = 0; i < axes; ++i)
    for (std::size_t j = 0; j < axes; ++j)
      if (i != j) best = std::min(best, chord_value(space, axis(space.dim, i), axis(space.dim, j), eps));
  if (space.dim == 1) best = std::min(best, chord_value(space, axis(1, 0), axis(1, 0), eps));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto m = random_unit(space, rng, gauss);
    const auto h = random_unit(space, rng, gauss);
    best = std::min(best, chord_value(space, m, h, eps));
  }
  return best;
}

double smoothness_modulus_estimate(const SpaceSpec& space, double t, std::size_t samples,
                                   std::uint64_t seed) {
  if (!(t >= 0.0)) throw argument_error("smoothness modulus argument must be nonnegative");
  if (t == 0.0) return 0.0;

  const std::size_t d = space.dim;
  std::vector<double> plus(d), minus(d);
  auto value = [&](const std::vector<double>& a, const std::vector<double>& bdir) {
    kernels::active().axpby(plus.data(), 1.0, a.data(), t, bdir.data(), d);
    kernels::active().axpby(minus.data(), 1.0, a.data(), -t, bdir.data(), d);
    return 0.5 * (raw_norm(space, plus) + raw_norm(space, minus)) - 1.0;
  };

  double best = 0.0;
  const std::size_t axes = std::min<std::size_t>(d, 4);
  for (std::size_t i = 0; i < axes; ++i)
    for (std::size_t j = 0; j < axes; ++j)
      best = std::max(best, value(axis(d, i), axis(d, j)));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto a = random_unit(space, rng, gauss);
    const auto b = random_unit(space, rng, gauss);
    best = std::max(best, value(a, b));
  }
  return best;
}

}  // namespace fixpoint
