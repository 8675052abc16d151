#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bsa/hyperbolic.hpp"
#include "bsa/manifold.hpp"
#include "bsa/sphere.hpp"
#include "oracles.hpp"

using namespace bsa;

namespace {

Point random_point(ManifoldKind m, std::mt19937_64& rng) {
  switch (m.geometry) {
    case Geometry::Sphere: return random_sphere_point(m, rng);
    case Geometry::Hyperbolic: return random_hyperbolic_point(m, rng);
    default: {
      std::normal_distribution<double> g(0.0, 1.0);
      Vec v(m.dim);
      for (int i = 0; i < v.size(); ++i) v(i) = g(rng);
      return Point(std::move(v), m);
    }
  }
}

}  // namespace

TEST_CASE("point validation") {
  Vec e1 = Vec::Zero(4);
  e1(0) = 1.0;
  CHECK_NOTHROW(Point(e1, ManifoldKind::sphere(3)));
  CHECK_THROWS_AS(Point(2.0 * e1, ManifoldKind::sphere(3)), DomainError);
  CHECK_NOTHROW(Point(e1, ManifoldKind::hyperbolic(3)));
  CHECK_THROWS_AS(Point(-e1, ManifoldKind::hyperbolic(3)), DomainError);
  CHECK_THROWS_AS(Point(e1, ManifoldKind::euclidean(3)), DomainError);
  CHECK_THROWS_AS(ManifoldKind::hyperbolic(1), DomainError);
}

TEST_CASE("scale functions: values and series continuity") {
  CHECK(sinc_scale(0.0) == doctest::Approx(1.0));
  CHECK(sinc_scale(kPi / 2) == doctest::Approx(kPi / 2));
  CHECK(sinhc_scale(0.0) == doctest::Approx(1.0));
  CHECK(theta_cot(kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(theta_coth(2.0) == doctest::Approx(2.0 / std::tanh(2.0)));
  // series branch agrees with the direct formula across the switch point
  for (double t : {0.9e-4, 1.1e-4}) {
    CHECK(sinc_scale(t) == doctest::Approx(t / std::sin(t)).epsilon(1e-13));
    CHECK(sinhc_scale(t) == doctest::Approx(t / std::sinh(t)).epsilon(1e-13));
    CHECK(theta_cot(t) == doctest::Approx(t / std::tan(t)).epsilon(1e-12));
    CHECK(theta_coth(t) ==
          doctest::Approx(t * std::cosh(t) / std::sinh(t)).epsilon(1e-12));
  }
}

TEST_CASE("exp/log round trips on 1000 random pairs per manifold") {
  std::mt19937_64 rng(7);
  for (ManifoldKind m : {ManifoldKind::sphere(3), ManifoldKind::hyperbolic(3),
                         ManifoldKind::euclidean(3)}) {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Point x = random_point(m, rng);
      Point y = random_point(m, rng);
      if (cut_locus_clearance(x, y) < 1e-3) continue;
      Point back = exp(x, log(x, y));
      worst = std::max(worst, (back.coords - y.coords).norm());
      // log o exp on a moderate tangent vector
      TangentVector v = log(x, y);
      if (v.norm() > 1e-12) {
        TangentVector v2 = log(x, exp(x, v));
        worst = std::max(worst, (v2.vec - v.vec).norm());
      }
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("distance closed forms") {
  ManifoldKind s2 = ManifoldKind::sphere(2);
  Vec e1(3), e2(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  CHECK(dist(Point(e1, s2), Point(e2, s2)) == doctest::Approx(kPi / 2));
  CHECK(cut_locus_clearance(Point(e1, s2), Point(e2, s2)) ==
        doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(log(Point(e1, s2), Point(Vec(-e1), s2)), CutLocusError);

  Vec h0(3), h1(3);
  h0 << 1, 0, 0;
  double t = 1.5;
  h1 << std::cosh(t), std::sinh(t), 0;
  ManifoldKind h2 = ManifoldKind::hyperbolic(2);
  CHECK(dist(Point(h0, h2), Point(h1, h2)) == doctest::Approx(t));
}

TEST_CASE("gradient of the squared distance vs finite differences") {
  std::mt19937_64 rng(11);
  for (ManifoldKind m :
       {ManifoldKind::sphere(3), ManifoldKind::hyperbolic(3)}) {
    for (int t = 0; t < 20; ++t) {
      Point x = random_point(m, rng);
      Point y = random_point(m, rng);
      if (cut_locus_clearance(x, y) < 0.3) continue;
      Mat basis = tangent_basis(x);
      Vec fd = oracle::fd_gradient(x, basis, [&](const Point& p) {
        double d = dist(p, y);
        return d * d;
      });
      TangentVector g = grad_dist_sq(x, y);
      Vec gc(basis.cols());
      for (int i = 0; i < basis.cols(); ++i)
        gc(i) = tangent_dot(m, basis.col(i), g.vec);
      CHECK((gc - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("tangent bases are orthonormal and tangent") {
  std::mt19937_64 rng(13);
  for (ManifoldKind m :
       {ManifoldKind::sphere(4), ManifoldKind::hyperbolic(4)}) {
    for (int t = 0; t < 20; ++t) {
      Point x = random_point(m, rng);
      Mat b = tangent_basis(x);
      REQUIRE(b.cols() == m.dim);
      for (int i = 0; i < b.cols(); ++i) {
        if (m.geometry == Geometry::Sphere)
          CHECK(std::abs(b.col(i).dot(x.coords)) <= 1e-10);
        else
          CHECK(std::abs(minkowski_dot(b.col(i), x.coords)) <= 1e-9);
        for (int j = 0; j < b.cols(); ++j) {
          double want = i == j ? 1.0 : 0.0;
          CHECK(std::abs(tangent_dot(m, b.col(i), b.col(j)) - want) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("half-squared-distance Hessian matches finite differences") {
  std::mt19937_64 rng(17);
  for (ManifoldKind m : {ManifoldKind::sphere(3), ManifoldKind::hyperbolic(3),
                         ManifoldKind::euclidean(3)}) {
    for (int t = 0; t < 15; ++t) {
      Point x = random_point(m, rng);
      Point y = random_point(m, rng);
      if (cut_locus_clearance(x, y) < 0.3) continue;
      Mat basis = tangent_basis(x);
      Mat fd = oracle::fd_hessian_half_dist_sq(x, basis, y);
      Mat cf = hessian_in_tangent_basis(hessian_dist_sq(x, y), basis);
      CHECK((cf - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("sphere Hessian spectrum {1, theta*cot(theta)}") {
  ManifoldKind m = ManifoldKind::sphere(3);
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    Point x = random_sphere_point(m, rng);
    Point y = random_sphere_point(m, rng);
    double theta = dist(x, y);
    if (theta < 1e-3 || kPi - theta < 1e-2) continue;
    Eigen::SelfAdjointEigenSolver<Mat> eig(
        hessian_in_tangent_basis(hessian_dist_sq(x, y), tangent_basis(x)));
    Vec s = eig.eigenvalues();  // ascending, n = 3
    std::vector<double> want = {theta_cot(theta), theta_cot(theta), 1.0};
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(s(i) - want[i]) <= 1e-9);
  }
}

TEST_CASE("sphere Hessian eigenvalue crosses zero exactly at theta = pi/2") {
  ManifoldKind m = ManifoldKind::sphere(2);
  Vec e1(3), e2(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  Point x(e1, m), y(e2, m);
  Eigen::SelfAdjointEigenSolver<Mat> eig(
      hessian_in_tangent_basis(hessian_dist_sq(x, y), tangent_basis(x)));
  CHECK(std::abs(eig.eigenvalues()(0)) <= 1e-9);
  CHECK(eig.eigenvalues()(1) == doctest::Approx(1.0));
}

TEST_CASE("hyperbolic Hessian is positive definite with eigenvalues >= 1") {
  ManifoldKind m = ManifoldKind::hyperbolic(3);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    Point x = random_hyperbolic_point(m, rng);
    Point y = random_hyperbolic_point(m, rng);
    Vec s = Eigen::SelfAdjointEigenSolver<Mat>(
                hessian_in_tangent_basis(hessian_dist_sq(x, y),
                                         tangent_basis(x)))
                .eigenvalues();
    CHECK(s(0) >= 1.0 - 1e-10);
  }
}

TEST_CASE("curvature-truncated differential of the log: order >= 2.7") {
  ManifoldKind m = ManifoldKind::sphere(3);
  std::mt19937_64 rng(29);
  Point x = random_sphere_point(m, rng);
  Mat basis = tangent_basis(x);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec dir = Vec::Zero(4);
  for (int i = 0; i < basis.cols(); ++i) dir += g(rng) * basis.col(i);
  dir /= dir.norm();
  std::vector<double> thetas = {0.2, 0.1, 0.05};
  std::vector<double> errs;
  for (double theta : thetas) {
    Point y = exp(x, TangentVector(x, theta * dir));
    Mat fd = oracle::fd_dlog(x, basis, y);
    Mat cf = taylor_dlog(x, y);
    errs.push_back((cf - fd).norm());
  }
  double order1 = std::log(errs[0] / errs[1]) / std::log(2.0);
  double order2 = std::log(errs[1] / errs[2]) / std::log(2.0);
  CHECK(order1 >= 2.7);
  CHECK(order2 >= 2.7);
}

TEST_CASE("first-moment closed forms match direct log summation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    ManifoldKind s = ManifoldKind::sphere(3);
    Mat refs(4, 3);
    Point x = random_sphere_point(s, rng);
    Vec lambda(3);
    Vec direct = Vec::Zero(4);
    for (int i = 0; i < 3; ++i) {
      Point p = random_sphere_point(s, rng);
      while (cut_locus_clearance(x, p) < 0.3) p = random_sphere_point(s, rng);
      refs.col(i) = p.coords;
      lambda(i) = u(rng);
      direct += lambda(i) * log(x, p).vec;
    }
    CHECK((sphere_first_moment(refs, x, lambda).vec - direct).norm() <=
          1e-12);

    ManifoldKind h = ManifoldKind::hyperbolic(3);
    Mat hrefs(4, 3);
    Point hx = random_hyperbolic_point(h, rng);
    Vec hdirect = Vec::Zero(4);
    for (int i = 0; i < 3; ++i) {
      Point p = random_hyperbolic_point(h, rng);
      hrefs.col(i) = p.coords;
      hdirect += lambda(i) * log(hx, p).vec;
    }
    CHECK((hyperbolic_first_moment(hrefs, hx, lambda).vec - hdirect).norm() <=
          1e-11);
  }
}
