#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Finite-dimensional real normed spaces: Euclidean R^d and the same
// coordinate space under an lp norm (1 < p < inf). Provides norms, the
// normalized and gauge duality maps, and Monte Carlo estimators for the
// moduli of convexity and smoothness.

namespace fixpoint {

class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);  // rejects non-finite entries
  static Point zeros(std::size_t dim);

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  const double* data() const { return c_.data(); }
  std::span<const double> span() const { return {c_.data(), c_.size()}; }
  const std::vector<double>& coords() const { return c_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> c_;
};

struct SpaceSpec {
  enum class Kind { Euclidean, Lp };
  Kind kind = Kind::Euclidean;
  std::size_t dim = 0;
  double p = 2.0;  // lp exponent, only meaningful for Kind::Lp

  static SpaceSpec euclidean(std::size_t dim);
  static SpaceSpec lp(double p, std::size_t dim);
  bool is_euclidean() const { return kind == Kind::Euclidean; }
};

// Gauge phi: strictly increasing, phi(0) = 0. Either phi(t) = t or
// phi(t) = t^q with q >= 1.
struct GaugeSpec {
  enum class Form { Identity, Power };
  Form form = Form::Identity;
  double q = 1.0;

  static GaugeSpec identity();
  static GaugeSpec power(double q);

  double value(double t) const;      // phi(t)
  double primitive(double t) const;  // psi(t) = integral of phi over [0, t]
};

double norm(const SpaceSpec& space, const Point& x);
double norm_diff(const SpaceSpec& space, const Point& x, const Point& y);

// Bilinear pairing <f, x> between a dual vector and a point (coordinates
// share the same basis, so this is the plain dot product).
double pairing(const Point& f, const Point& x);

// Normalized duality map J: <J(x), x> = ||x||^2 and ||J(x)||_* = ||x||.
// Identity on Euclidean space; the lp formula is
// J(x)_i = ||x||^(2-p) |x_i|^(p-1) sign(x_i).
Point duality_map(const SpaceSpec& space, const Point& x);

// Duality map with gauge phi: <f, x> = ||x|| phi(||x||), ||f||_* = phi(||x||);
// f = 0 at x = 0.
Point gauge_duality_map(const SpaceSpec& space, const GaugeSpec& gauge, const Point& x);

double gauge_primitive(const GaugeSpec& gauge, double t);

// Sampled upper estimate of the modulus of convexity
//   delta(eps) = inf { 1 - ||a+b||/2 : ||a||,||b|| <= 1, ||a-b|| >= eps }.
// Minimizes over `samples` random admissible pairs plus deterministic axis
// seeds; refinement is monotone nonincreasing in `samples` for a fixed seed.
double convexity_modulus_estimate(const SpaceSpec& space, double eps, std::size_t samples,
                                  std::uint64_t seed);

// Sampled lower estimate of the modulus of smoothness
//   rho(t) = sup { (||a+b|| + ||a-b||)/2 - 1 : ||a|| = 1, ||b|| = t },
// monotone nondecreasing in `samples` for a fixed seed.
double smoothness_modulus_estimate(const SpaceSpec& space, double t, std::size_t samples,
                                   std::uint64_t seed);

// Defect of the anchored-step norm inequality
//   ||a+b||^2 <= ||a||^2 + 2 <b, J(a+b)>,
// i.e. LHS - RHS; nonpositive up to roundoff in every supported space.
double norm_inequality_defect(const SpaceSpec& space, const Point& a, const Point& b);

// Defect of the gauge form psi(||a+b||) <= psi(||a||) + <b, f(a+b)> with f
// the gauge duality map.
double gauge_norm_inequality_defect(const SpaceSpec& space, const GaugeSpec& gauge,
                                    const Point& a, const Point& b);

}  // namespace fixpoint
