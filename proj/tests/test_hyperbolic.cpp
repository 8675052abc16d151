#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bsa/hyperbolic.hpp"
#include "oracles.hpp"

using namespace bsa;

TEST_CASE("Minkowski pairing and J") {
  Vec x(3), y(3);
  x << 2, 1, 0;
  y << 1, 3, -1;
  CHECK(minkowski_dot(x, y) == doctest::Approx(1 * 3 + 0 * -1 - 2 * 1));
  Vec jx(3);
  jx << -2, 1, 0;
  CHECK((minkowski_J(3) * x - jx).norm() == 0.0);
}

TEST_CASE("tangent projection is idempotent and tangent") {
  ManifoldKind m = ManifoldKind::hyperbolic(3);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Point x = random_hyperbolic_point(m, rng);
    Vec w(4);
    for (int i = 0; i < 4; ++i) w(i) = g(rng);
    TangentVector v = tangent_projection(x, w);
    CHECK(std::abs(minkowski_dot(v.vec, x.coords)) <= 1e-9);
    TangentVector v2 = tangent_projection(x, v.vec);
    CHECK((v2.vec - v.vec).norm() <= 1e-10);
  }
}

TEST_CASE("Weierstrass chart round trip") {
  std::mt19937_64 rng(11);
  ManifoldKind m = ManifoldKind::hyperbolic(2);
  for (int t = 0; t < 50; ++t) {
    Point x = random_hyperbolic_point(m, rng, 2.0);
    CHECK(x.constraint_violation() <= 1e-9);
    Point back = from_weierstrass(to_weierstrass(x));
    CHECK((back.coords - x.coords).norm() <= 1e-9);
  }
  Vec xh(2);
  xh << 0.0, 0.0;
  Point origin = from_weierstrass(xh);
  CHECK(origin.coords(0) == doctest::Approx(1.0));
}

TEST_CASE("hyperbolic exp grows distance linearly along geodesics") {
  ManifoldKind m = ManifoldKind::hyperbolic(2);
  std::mt19937_64 rng(13);
  Point x = random_hyperbolic_point(m, rng);
  Mat b = tangent_basis(x);
  TangentVector v(x, Vec(b.col(0)));
  for (double t : {0.1, 1.0, 3.0, 8.0}) {
    Point y = exp(x, TangentVector(x, t * v.vec));
    CHECK(dist(x, y) == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("renormalization guards against drift at large distances") {
  // chained exp steps stay exactly on the hyperboloid
  ManifoldKind m = ManifoldKind::hyperbolic(2);
  Vec xh(2);
  xh << 0.0, 0.0;
  Point x = from_weierstrass(xh);
  Mat b = tangent_basis(x);
  for (int i = 0; i < 50; ++i) {
    x = exp(x, tangent_projection(x, b.col(i % 2)));
    CHECK(x.constraint_violation() <= 1e-9);
  }
}
