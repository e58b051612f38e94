#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fixpoint/errors.hpp"
#include "fixpoint/operators.hpp"
#include "fixpoint/space.hpp"

using namespace fixpoint;

namespace {

Point random_point(std::mt19937_64& rng, std::size_t d, double scale = 4.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> c(d);
  for (auto& x : c) x = dist(rng);
  return Point(std::move(c));
}

std::vector<MapSpec> catalogue_maps() {
  std::vector<MapSpec> maps;
  maps.push_back(halfspace_projection(Point({1.0, 0.0}), 0.0));
  maps.push_back(ball_projection(Point({0.5, -0.5}), 2.0));
  maps.push_back(box_projection(Point({-1.0, 0.0}), Point({1.0, 2.0})));
  maps.push_back(affine_projection({Point({1.0, 1.0})}, {1.0}));
  maps.push_back(plane_rotation(1.1));
  maps.push_back(subgradient_projector(
      {Halfspace{Point({1.0, 0.0}), 0.0}, Halfspace{Point({0.0, 1.0}), 1.0}}));
  maps.push_back(averaged_map(ball_projection(Point({0.0, 0.0}), 1.0), 0.5));
  maps.push_back(composition({halfspace_projection(Point({1.0, 0.0}), 0.0),
                              box_projection(Point({-3.0, -3.0}), Point({3.0, 3.0}))}));
  return maps;
}

std::vector<OperatorSpec> catalogue_operators() {
  std::vector<OperatorSpec> ops;
  ops.push_back(quadratic_subdifferential(Point({0.5, -1.0}), 2.0));
  ops.push_back(l1_subdifferential(1.0));
  ops.push_back(indicator_subdifferential(ball_projection(Point({0.0, 0.0}), 1.5)));
  ops.push_back(linear_psd({Point({2.0, 1.0}), Point({1.0, 2.0})}));
  return ops;
}

}  // namespace

TEST_CASE("halfspace projection leaves interior points and projects violators") {
  auto e2 = SpaceSpec::euclidean(2);
  auto T = halfspace_projection(Point({1.0, 0.0}), 0.0);
  CHECK(apply_map(e2, T, Point({-1.0, 5.0})) == Point({-1.0, 5.0}));
  Point y = apply_map(e2, T, Point({2.0, 3.0}));
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y[1] == 3.0);
  CHECK(fixed_point_residual(e2, T, Point({2.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("plane rotation is an isometry with fixed point zero") {
  auto e2 = SpaceSpec::euclidean(2);
  auto R = plane_rotation(M_PI / 2.0);
  Point y = apply_map(e2, R, Point({1.0, 0.0}));
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    Point x = random_point(rng, 2);
    CHECK(norm(e2, apply_map(e2, R, x)) == doctest::Approx(norm(e2, x)).epsilon(1e-13));
  }
  CHECK(map_witness(R) == Point::zeros(2));
}

TEST_CASE("averaged map scales the residual by lambda") {
  auto e2 = SpaceSpec::euclidean(2);
  auto T = halfspace_projection(Point({1.0, 0.0}), 0.0);
  auto A = averaged_map(halfspace_projection(Point({1.0, 0.0}), 0.0), 0.25);
  std::mt19937_64 rng(32);
  for (int k = 0; k < 50; ++k) {
    Point x = random_point(rng, 2);
    CHECK(fixed_point_residual(e2, A, x) ==
          doctest::Approx(0.25 * fixed_point_residual(e2, T, x)).epsilon(1e-12));
  }
}

TEST_CASE("projection maps are idempotent and sunny") {
  auto e2 = SpaceSpec::euclidean(2);
  std::vector<MapSpec> projs;
  projs.push_back(halfspace_projection(Point({1.0, -2.0}), 0.5));
  projs.push_back(ball_projection(Point({0.5, -0.5}), 2.0));
  projs.push_back(box_projection(Point({-1.0, 0.0}), Point({1.0, 2.0})));
  projs.push_back(affine_projection({Point({1.0, 1.0})}, {1.0}));

  std::mt19937_64 rng(33);
  for (const auto& P : projs) {
    CAPTURE(map_kind_name(P));
    Point w = map_witness(P);
    CHECK(in_fixed_set(P, w, 1e-9));
    for (int k = 0; k < 100; ++k) {
      Point x = random_point(rng, 2);
      Point px = apply_map(e2, P, x);
      Point ppx = apply_map(e2, P, px);
      CHECK(norm_diff(e2, px, ppx) <= 1e-10);
      CHECK(in_fixed_set(P, px, 1e-8));
      // sunny: the residual points away from every fixed point
      double inner = 0;
      for (std::size_t i = 0; i < 2; ++i) inner += (x[i] - px[i]) * (w[i] - px[i]);
      CHECK(inner <= 1e-9);
    }
  }
}

TEST_CASE("catalogue maps are quasi-nonexpansive about their witnesses") {
  auto e2 = SpaceSpec::euclidean(2);
  std::mt19937_64 rng(34);
  for (const auto& T : catalogue_maps()) {
    CAPTURE(map_kind_name(T));
    Point p = map_witness(T);
    CHECK(in_fixed_set(T, p, 1e-9));
    CHECK(fixed_point_residual(e2, T, p) <= 1e-10);
    for (int k = 0; k < 200; ++k) {
      Point x = random_point(rng, 2);
      Point tx = apply_map(e2, T, x);
      CHECK(norm_diff(e2, tx, p) <= norm_diff(e2, x, p) + 1e-10);
    }
  }
}

TEST_CASE("subgradient projector details") {
  auto e2 = SpaceSpec::euclidean(2);

  // feasible point: no move
  auto S = subgradient_projector(
      {Halfspace{Point({1.0, 0.0}), 0.0}, Halfspace{Point({0.0, 1.0}), 1.0}});
  CHECK(apply_map(e2, S, Point({-1.0, 0.5})) == Point({-1.0, 0.5}));

  // single cut: agrees with the halfspace projection everywhere
  auto S1 = subgradient_projector({Halfspace{Point({3.0, -1.0}), 2.0}});
  auto P1 = halfspace_projection(Point({3.0, -1.0}), 2.0);
  std::mt19937_64 rng(35);
  for (int k = 0; k < 50; ++k) {
    Point x = random_point(rng, 2);
    CHECK(norm_diff(e2, apply_map(e2, S1, x), apply_map(e2, P1, x)) <= 1e-12);
  }

  // tie on the violation: the lowest-index cut is the one projected on
  auto S2 = subgradient_projector(
      {Halfspace{Point({1.0, 0.0}), 0.0}, Halfspace{Point({0.0, 1.0}), 0.0}});
  Point y = apply_map(e2, S2, Point({2.0, 2.0}));
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y[1] == 2.0);
}

TEST_CASE("composition applies stages left to right") {
  auto e2 = SpaceSpec::euclidean(2);
  auto C = composition({plane_rotation(M_PI / 2.0), halfspace_projection(Point({1.0, 0.0}), 0.0)});
  Point y = apply_map(e2, C, Point({1.0, 0.0}));
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("map factories reject bad arguments") {
  CHECK_THROWS_AS(halfspace_projection(Point({0.0, 0.0}), 1.0), argument_error);
  CHECK_THROWS_AS(ball_projection(Point({0.0, 0.0}), 0.0), argument_error);
  CHECK_THROWS_AS(box_projection(Point({1.0}), Point({0.0})), argument_error);
  CHECK_THROWS_AS(affine_projection({}, {}), argument_error);
  CHECK_THROWS_AS(affine_projection({Point({1.0, 0.0}), Point({1.0, 0.0})}, {0.0, 1.0}),
                  argument_error);
  CHECK_THROWS_AS(averaged_map(plane_rotation(0.3), 0.0), argument_error);
  CHECK_THROWS_AS(averaged_map(plane_rotation(0.3), 1.0), argument_error);
  CHECK_THROWS_AS(composition({}), argument_error);
  CHECK_THROWS_AS(subgradient_projector({}), argument_error);
  CHECK_THROWS_AS(subgradient_projector({Halfspace{Point({0.0, 0.0}), 1.0}}), argument_error);
  // empty intersection: x1 <= -1 and x1 >= 1
  CHECK_THROWS_AS(composition({halfspace_projection(Point({1.0, 0.0}), -1.0),
                               halfspace_projection(Point({-1.0, 0.0}), -1.0)}),
                  argument_error);
}

TEST_CASE("validate_map gates dimensions and lp safety") {
  auto e3 = SpaceSpec::euclidean(3);
  auto l3 = SpaceSpec::lp(3.0, 2);
  CHECK_THROWS_AS(validate_map(e3, plane_rotation(0.5)), argument_error);
  CHECK_THROWS_AS(validate_map(l3, halfspace_projection(Point({1.0, 0.0}), 0.0)),
                  validation_error);
  CHECK_NOTHROW(validate_map(l3, box_projection(Point({-1.0, -1.0}), Point({1.0, 1.0}))));
  CHECK_NOTHROW(validate_map(
      l3, averaged_map(box_projection(Point({-1.0, -1.0}), Point({1.0, 1.0})), 0.5)));
  CHECK(map_is_lp_safe(box_projection(Point({-1.0}), Point({1.0}))));
  CHECK(!map_is_lp_safe(plane_rotation(0.5)));
}

TEST_CASE("resolvent closed forms") {
  auto e2 = SpaceSpec::euclidean(2);

  auto Q = quadratic_subdifferential(Point({0.0, 0.0}), 1.0);
  Point yq = resolvent(e2, Q, 1.0, Point({2.0, 4.0}));
  CHECK(yq[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(yq[1] == doctest::Approx(2.0).epsilon(1e-15));

  auto L = l1_subdifferential(1.0);
  Point yl = resolvent(e2, L, 0.5, Point({0.3, -2.0}));
  CHECK(yl[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(yl[1] == doctest::Approx(-1.5).epsilon(1e-15));

  auto M = linear_psd({Point({2.0, 0.0}), Point({0.0, 0.0})});
  Point ym = resolvent(e2, M, 1.0, Point({3.0, 5.0}));
  CHECK(ym[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ym[1] == doctest::Approx(5.0).epsilon(1e-13));

  // indicator: the resolvent is the projection, for every scale
  auto I = indicator_subdifferential(ball_projection(Point({0.0, 0.0}), 1.0));
  for (double r : {0.1, 1.0, 50.0}) {
    Point yi = resolvent(e2, I, r, Point({2.0, 0.0}));
    CHECK(yi[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(yi[1] == 0.0);
  }

  CHECK_THROWS_AS(resolvent(e2, Q, 0.0, Point({1.0, 1.0})), argument_error);
}

TEST_CASE("resolvents are firmly nonexpansive and fix the zero set") {
  auto e2 = SpaceSpec::euclidean(2);
  std::mt19937_64 rng(36);
  for (const auto& op : catalogue_operators()) {
    CAPTURE(operator_kind_name(op));
    Point w = operator_witness(op, 2);
    CHECK(in_zero_set(op, w, 1e-9));
    for (double r : {0.3, 1.0, 4.0}) {
      CHECK(norm_diff(e2, resolvent(e2, op, r, w), w) <= 1e-10);
      for (int k = 0; k < 100; ++k) {
        Point x = random_point(rng, 2);
        Point y = random_point(rng, 2);
        Point jx = resolvent(e2, op, r, x);
        Point jy = resolvent(e2, op, r, y);
        double inner = 0;
        for (std::size_t i = 0; i < 2; ++i) inner += (jx[i] - jy[i]) * (x[i] - y[i]);
        double nd = norm_diff(e2, jx, jy);
        CHECK(inner >= nd * nd - 1e-10);
      }
    }
  }
}

TEST_CASE("resolvent comparison bound") {
  auto e2 = SpaceSpec::euclidean(2);

  auto Q = quadratic_subdifferential(Point({0.0, 0.0}), 1.0);
  CHECK(resolvent_identity_defect(e2, Q, Point({3.0, -1.0}), 2.0, 2.0) == 0.0);
  CHECK(resolvent_identity_defect(e2, Q, Point({1.0, 0.0}), 2.0, 1.0) ==
        doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(resolvent_identity_defect(e2, Q, Point({1.0, 0.0}), 0.0, 1.0), argument_error);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> logr(-2.0, 2.0);
  for (const auto& op : catalogue_operators()) {
    CAPTURE(operator_kind_name(op));
    for (int t = 0; t < 250; ++t) {
      Point x = random_point(rng, 2);
      double k = std::pow(10.0, logr(rng));
      double l = std::pow(10.0, logr(rng));
      CHECK(resolvent_identity_defect(e2, op, x, k, l) <= 1e-10);
    }
  }
}

TEST_CASE("family combination") {
  auto e2 = SpaceSpec::euclidean(2);

  Point base({0.7, -0.3});
  std::vector<double> w1 = {1.0};
  CHECK(family_combination(e2, w1, base, {}) == base);

  std::vector<double> w2 = {0.5, 0.5};
  std::vector<Point> imgs = {Point({2.0, 2.0})};
  Point c = family_combination(e2, w2, Point({0.0, 0.0}), imgs);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<double> bad_sum = {0.5, 0.4};
  CHECK_THROWS_AS(family_combination(e2, bad_sum, base, imgs), argument_error);
  std::vector<double> neg = {1.5, -0.5};
  CHECK_THROWS_AS(family_combination(e2, neg, base, imgs), argument_error);
  std::vector<double> wrong_arity = {0.5, 0.25, 0.25};
  CHECK_THROWS_AS(family_combination(e2, wrong_arity, base, imgs), argument_error);

  // hull membership, coordinatewise
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Point b = random_point(rng, 2);
    std::vector<Point> pts = {random_point(rng, 2), random_point(rng, 2)};
    double a0 = uw(rng), a1 = uw(rng), a2 = uw(rng);
    double s = a0 + a1 + a2;
    std::vector<double> w = {a0 / s, a1 / s, a2 / s};
    Point comb = family_combination(e2, w, b, pts);
    for (std::size_t i = 0; i < 2; ++i) {
      double lo = std::min({b[i], pts[0][i], pts[1][i]});
      double hi = std::max({b[i], pts[0][i], pts[1][i]});
      CHECK(comb[i] >= lo - 1e-12);
      CHECK(comb[i] <= hi + 1e-12);
    }
  }
}

TEST_CASE("combination inequality defect") {
  auto e2 = SpaceSpec::euclidean(2);

  std::vector<double> w = {0.5, 0.5};
  std::vector<Point> same = {Point({1.0, 2.0}), Point({1.0, 2.0})};
  CHECK(combination_inequality_defect(e2, w, same, 0, 1) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<Point> pm = {Point({1.0, 0.0}), Point({-1.0, 0.0})};
  CHECK(combination_inequality_defect(e2, w, pm, 0, 1) == 0.0);

  std::mt19937_64 rng(39);
  std::uniform_real_distribution<double> uw(0.05, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point> pts = {random_point(rng, 2), random_point(rng, 2), random_point(rng, 2)};
    double a0 = uw(rng), a1 = uw(rng), a2 = uw(rng);
    double s = a0 + a1 + a2;
    std::vector<double> w3 = {a0 / s, a1 / s, a2 / s};
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t l = 0; l < 3; ++l)
        if (k != l) CHECK(combination_inequality_defect(e2, w3, pts, k, l) <= 1e-10);
  }

  CHECK_THROWS_AS(combination_inequality_defect(SpaceSpec::lp(3.0, 2), w, pm, 0, 1),
                  argument_error);
  CHECK_THROWS_AS(combination_inequality_defect(e2, w, pm, 0, 2), argument_error);
  std::vector<double> wz = {1.0, 0.0};
  CHECK_THROWS_AS(combination_inequality_defect(e2, wz, pm, 0, 1), argument_error);
}

TEST_CASE("fixed set and zero set projection pieces fix the witness") {
  auto e2 = SpaceSpec::euclidean(2);
  for (const auto& T : catalogue_maps()) {
    CAPTURE(map_kind_name(T));
    Point w = map_witness(T);
    for (const auto& piece : fixed_set_projections(T))
      CHECK(norm_diff(e2, apply_map(e2, piece, w), w) <= 1e-9);
  }
  for (const auto& op : catalogue_operators()) {
    CAPTURE(operator_kind_name(op));
    Point w = operator_witness(op, 2);
    for (const auto& piece : zero_set_projections(op, 2))
      CHECK(norm_diff(e2, apply_map(e2, piece, w), w) <= 1e-9);
  }
}
