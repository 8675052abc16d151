#pragma once

// Closed-form extras on the hyperboloid H^n in the Minkowski embedding:
// tangent projection, first weighted moment and Weierstrass coordinates.

#include <random>

#include "bsa/manifold.hpp"

namespace bsa {

// Orthogonal projection of an ambient vector onto T_x H^n:
// v = w + <w,x>_* x. Idempotent, <v,x>_* = 0.
inline TangentVector tangent_projection(const Point& x, const Vec& w) {
  if (x.manifold.geometry != Geometry::Hyperbolic)
    throw DomainError("tangent_projection requires a hyperboloid point");
  Vec v = w + minkowski_dot(w, x.coords) * x.coords;
  return TangentVector(x, std::move(v));
}

// First weighted moment M1(x, lambda) = (Id + xx^T J) X F*(X,x) lambda with
// F* = Diag(f*(arccosh(-<x_i,x>_*))).
inline TangentVector hyperbolic_first_moment(const Mat& refs, const Point& x,
                                             const Vec& lambda) {
  if (x.manifold.geometry != Geometry::Hyperbolic)
    throw DomainError("hyperbolic_first_moment requires a hyperboloid point");
  if (refs.rows() != x.coords.size() || refs.cols() != lambda.size())
    throw DomainError("reference/weight size mismatch");
  Vec scaled(lambda.size());
  for (int i = 0; i < refs.cols(); ++i) {
    double theta = detail::clamped_acosh(-minkowski_dot(refs.col(i), x.coords));
    scaled(i) = sinhc_scale(theta) * lambda(i);
  }
  Vec m = refs * scaled;
  m += minkowski_dot(m, x.coords) * x.coords;
  return TangentVector(x, std::move(m));
}

// Weierstrass chart: x = (sqrt(1+||xh||^2), xh).
inline Point from_weierstrass(const Vec& xh) {
  Vec c(xh.size() + 1);
  c(0) = std::sqrt(1.0 + xh.squaredNorm());
  c.tail(xh.size()) = xh;
  return Point(std::move(c), ManifoldKind::hyperbolic(int(xh.size())));
}

inline Vec to_weierstrass(const Point& x) {
  if (x.manifold.geometry != Geometry::Hyperbolic)
    throw DomainError("to_weierstrass requires a hyperboloid point");
  return x.coords.tail(x.manifold.dim);
}

inline Point random_hyperbolic_point(ManifoldKind m, std::mt19937_64& rng,
                                     double spread = 1.0) {
  std::normal_distribution<double> gauss(0.0, spread);
  Vec xh(m.dim);
  for (int i = 0; i < xh.size(); ++i) xh(i) = gauss(rng);
  return from_weierstrass(xh);
}

}  // namespace bsa
