#pragma once

// Closed-form extras on S^n: the first weighted moment in matrix form,
// sampling (wrapped Gaussian, uniform spherical triangle) and the planar
// triangle shape embedding onto the unit 2-sphere.

#include <complex>
#include <random>

#include "bsa/manifold.hpp"

namespace bsa {

// First weighted moment M1(x, lambda) = (Id - xx^T) X F(X,x) lambda with
// F = Diag(f(arccos(x_i^T x))). Homogeneous of degree 1 in lambda.
inline TangentVector sphere_first_moment(const Mat& refs, const Point& x,
                                         const Vec& lambda) {
  if (x.manifold.geometry != Geometry::Sphere)
    throw DomainError("sphere_first_moment requires a sphere point");
  if (refs.rows() != x.coords.size() || refs.cols() != lambda.size())
    throw DomainError("reference/weight size mismatch");
  Vec scaled = Vec::Zero(lambda.size());
  for (int i = 0; i < refs.cols(); ++i) {
    double theta = detail::clamped_acos(refs.col(i).dot(x.coords));
    if (kPi - theta < 1e-8)
      throw CutLocusError("reference point antipodal to the base point");
    scaled(i) = sinc_scale(theta) * lambda(i);
  }
  Vec m = refs * scaled;
  m -= m.dot(x.coords) * x.coords;
  return TangentVector(x, std::move(m));
}

inline Point random_sphere_point(ManifoldKind m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(m.ambient_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  return Point(v / v.norm(), m);
}

// exp_x(v) with v isotropic Gaussian in the tangent space, per-coordinate
// standard deviation sigma (radians).
inline Point wrapped_gaussian_sample(const Point& center, double sigma,
                                     std::mt19937_64& rng) {
  if (sigma < 0.0) throw DomainError("sigma must be non-negative");
  if (sigma == 0.0) return center;
  Mat basis = tangent_basis(center);
  std::normal_distribution<double> gauss(0.0, sigma);
  Vec v = Vec::Zero(center.coords.size());
  for (int i = 0; i < basis.cols(); ++i) v += gauss(rng) * basis.col(i);
  return exp(center, TangentVector(center, std::move(v)));
}

// Uniform draw from the spherical triangle (a, b, c): planar barycentric
// proposal on the chord triangle, centrally projected onto the sphere.
// Uniform-on-plane induces a sphere density ~ ||p||^3, so accept with
// probability (d / ||p||)^3 where d is the plane's distance to the origin.
inline Point uniform_triangle_sample(const Point& a, const Point& b,
                                     const Point& c, std::mt19937_64& rng) {
  detail::require_same_manifold(a, b);
  detail::require_same_manifold(a, c);
  Mat tri(a.coords.size(), 3);
  tri.col(0) = a.coords;
  tri.col(1) = b.coords;
  tri.col(2) = c.coords;
  Eigen::JacobiSVD<Mat> svd(tri);
  if (svd.singularValues()(2) < 1e-10)
    throw DomainError("degenerate spherical triangle");
  Mat edges(a.coords.size(), 2);
  edges.col(0) = b.coords - a.coords;
  edges.col(1) = c.coords - a.coords;
  Vec foot = a.coords - edges * edges.colPivHouseholderQr().solve(a.coords);
  double d = foot.norm();  // distance from origin to the chord plane
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 1000000; ++trial) {
    double r1 = unif(rng), r2 = unif(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    Vec p = (1.0 - r1 - r2) * a.coords + r1 * b.coords + r2 * c.coords;
    double ratio = d / p.norm();
    if (unif(rng) < ratio * ratio * ratio)
      return Point(p / p.norm(), a.manifold);
  }
  throw NonConvergenceError("triangle rejection sampling exhausted");
}

// Shape of a planar triangle on the unit 2-sphere. Helmert coordinates
// (z1, z2) in C^2 of the translation-free configuration, scaled to unit
// pre-shape norm; the planar rotation is quotiented by the Hopf map
// (|z1|^2-|z2|^2, 2 Re(z1 conj(z2)), 2 Im(z1 conj(z2))) / 2, which lands on
// Kendall's sphere of radius 1/2. The result is rescaled to the unit sphere
// and the factor 2 reported alongside.
struct TriangleShape {
  Point point;         // unit S^2
  double scale = 2.0;  // unit-sphere radius over Kendall radius 1/2
};

inline TriangleShape kendall_shape_of_triangle(const Eigen::Vector2d& p1,
                                               const Eigen::Vector2d& p2,
                                               const Eigen::Vector2d& p3) {
  using C = std::complex<double>;
  C c1(p1.x(), p1.y()), c2(p2.x(), p2.y()), c3(p3.x(), p3.y());
  C z1 = (c2 - c1) / std::sqrt(2.0);
  C z2 = (2.0 * c3 - c1 - c2) / std::sqrt(6.0);
  double size = std::sqrt(std::norm(z1) + std::norm(z2));
  if (size < 1e-14)
    throw DomainError("degenerate (zero-size) triangle configuration");
  z1 /= size;
  z2 /= size;
  Vec s(3);
  s(0) = std::norm(z1) - std::norm(z2);
  C cross = z1 * std::conj(z2);
  s(1) = 2.0 * cross.real();
  s(2) = 2.0 * cross.imag();
  // s already has unit norm: Hopf image of the unit pre-shape sphere
  return TriangleShape{Point(s / s.norm(), ManifoldKind::sphere(2)), 2.0};
}

}  // namespace bsa
