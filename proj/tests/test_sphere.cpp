#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bsa/sphere.hpp"
#include "oracles.hpp"

using namespace bsa;

TEST_CASE("wrapped Gaussian: sigma 0 returns the center, samples stay near") {
  ManifoldKind m = ManifoldKind::sphere(3);
  std::mt19937_64 rng(3);
  Point c = random_sphere_point(m, rng);
  Point z = wrapped_gaussian_sample(c, 0.0, rng);
  CHECK((z.coords - c.coords).norm() == 0.0);
  double sigma = 0.05;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t)
    worst = std::max(worst, dist(c, wrapped_gaussian_sample(c, sigma, rng)));
  CHECK(worst < 6.0 * sigma * std::sqrt(3.0));
  CHECK_THROWS_AS(wrapped_gaussian_sample(c, -1.0, rng), DomainError);
}

TEST_CASE("triangle sampler: samples lie inside the triangle") {
  ManifoldKind m = ManifoldKind::sphere(2);
  Vec e1(3), e2(3), e3(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  e3 << 0, 0, 1;
  Point a(e1, m), b(e2, m), c(e3, m);
  std::mt19937_64 rng(5);
  Mat tri(3, 3);
  tri << e1, e2, e3;
  for (int t = 0; t < 500; ++t) {
    Point p = uniform_triangle_sample(a, b, c, rng);
    // central-projection barycentric coordinates must all be positive
    Vec w = tri.colPivHouseholderQr().solve(p.coords);
    CHECK(w.minCoeff() > -1e-12);
  }
}

TEST_CASE("triangle sampler: uniformity via the closest-vertex partition") {
  // octant triangle: by symmetry each closest-vertex cell holds 1/3
  ManifoldKind m = ManifoldKind::sphere(2);
  Vec e1(3), e2(3), e3(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  e3 << 0, 0, 1;
  Point a(e1, m), b(e2, m), c(e3, m);
  std::mt19937_64 rng(9);
  int n = 6000;
  int counts[3] = {0, 0, 0};
  for (int t = 0; t < n; ++t) {
    Point p = uniform_triangle_sample(a, b, c, rng);
    int arg = 0;
    p.coords.maxCoeff(&arg);
    ++counts[arg];
  }
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(counts[i] / double(n) - 1.0 / 3.0) < 0.035);
}

TEST_CASE("triangle sampler rejects degenerate triangles") {
  ManifoldKind m = ManifoldKind::sphere(2);
  Vec e1(3), e2(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  std::mt19937_64 rng(1);
  Vec mid = (e1 + e2).normalized();
  CHECK_THROWS_AS(uniform_triangle_sample(Point(e1, m), Point(e2, m),
                                          Point(mid, m), rng),
                  DomainError);
}

TEST_CASE("triangle shapes: equilateral triads map to a pole") {
  Eigen::Vector2d p1(0, 0), p2(1, 0), p3(0.5, std::sqrt(3.0) / 2.0);
  TriangleShape s = kendall_shape_of_triangle(p1, p2, p3);
  CHECK(s.scale == 2.0);
  CHECK(std::abs(s.point.coords(0)) <= 1e-12);
  CHECK(std::abs(s.point.coords(1)) <= 1e-12);
  CHECK(std::abs(std::abs(s.point.coords(2)) - 1.0) <= 1e-12);
  // the mirrored triad lands on the opposite pole
  TriangleShape sm = kendall_shape_of_triangle(
      {p1.x(), -p1.y()}, {p2.x(), -p2.y()}, {p3.x(), -p3.y()});
  CHECK(s.point.coords(2) == doctest::Approx(-sm.point.coords(2)));
}

TEST_CASE("triangle shapes: similarity invariance") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::Vector2d p1(u(rng), u(rng)), p2(u(rng), u(rng)), p3(u(rng), u(rng));
    if ((p2 - p1).norm() < 0.1 || (p3 - p1).norm() < 0.1) continue;
    double ang = u(rng) * kPi;
    double scale = 0.3 + std::abs(u(rng));
    Eigen::Matrix2d rot;
    rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    Eigen::Vector2d shift(u(rng), u(rng));
    auto tf = [&](const Eigen::Vector2d& p) {
      return Eigen::Vector2d(scale * rot * p + shift);
    };
    TriangleShape s0 = kendall_shape_of_triangle(p1, p2, p3);
    TriangleShape s1 = kendall_shape_of_triangle(tf(p1), tf(p2), tf(p3));
    CHECK((s0.point.coords - s1.point.coords).norm() <= 1e-10);
  }
}

TEST_CASE("triangle shapes: collinear triads land on the equator") {
  TriangleShape s = kendall_shape_of_triangle({-1.0, 1.0}, {0.5, 0.25},
                                              {2.0, -0.5});
  CHECK(std::abs(s.point.coords(2)) <= 1e-12);
  CHECK_THROWS_AS(
      kendall_shape_of_triangle({1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}),
      DomainError);
}
