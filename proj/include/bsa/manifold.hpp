#pragma once

// Constant-curvature manifold kernel: points, tangent vectors, exp/log,
// distances and the closed-form Hessian of the (half) squared distance on
// the unit sphere S^n, the hyperboloid H^n and Euclidean space R^n.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bsa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CutLocusError : Error {
  using Error::Error;
};
struct ZeroMassError : Error {
  using Error::Error;
};
struct FocalPointError : Error {
  using Error::Error;
};
struct NotOnEbsError : Error {
  using Error::Error;
};
struct NonConvergenceError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct DegenerateHessianError : Error {
  using Error::Error;
};
struct InsufficientDataError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Manifold tags

enum class Geometry { Sphere, Hyperbolic, Euclidean };

struct ManifoldKind {
  Geometry geometry;
  int dim;  // intrinsic dimension n

  ManifoldKind(Geometry g, int n) : geometry(g), dim(n) {
    if (g == Geometry::Sphere && n < 1)
      throw DomainError("sphere requires n >= 1");
    if (g == Geometry::Hyperbolic && n < 2)
      throw DomainError("hyperbolic space requires n >= 2");
    if (g == Geometry::Euclidean && n < 1)
      throw DomainError("euclidean space requires n >= 1");
  }

  static ManifoldKind sphere(int n) { return {Geometry::Sphere, n}; }
  static ManifoldKind hyperbolic(int n) { return {Geometry::Hyperbolic, n}; }
  static ManifoldKind euclidean(int n) { return {Geometry::Euclidean, n}; }

  // Dimension of the embedding coordinates.
  int ambient_dim() const {
    return geometry == Geometry::Euclidean ? dim : dim + 1;
  }

  double curvature() const {
    switch (geometry) {
      case Geometry::Sphere: return 1.0;
      case Geometry::Hyperbolic: return -1.0;
      default: return 0.0;
    }
  }

  bool operator==(const ManifoldKind& o) const {
    return geometry == o.geometry && dim == o.dim;
  }
  bool operator!=(const ManifoldKind& o) const { return !(*this == o); }
};

// Minkowski pairing <x,y>_* = x^T J y with J = diag(-1, Id_n).
inline double minkowski_dot(const Vec& x, const Vec& y) {
  return x.tail(x.size() - 1).dot(y.tail(y.size() - 1)) - x(0) * y(0);
}

inline Mat minkowski_J(int ambient) {
  Vec d = Vec::Ones(ambient);
  d(0) = -1.0;
  return d.asDiagonal();
}

// ---------------------------------------------------------------------------
// Points and tangent vectors (embedding coordinates, manifold-tagged)

struct Point {
  Vec coords;
  ManifoldKind manifold;

  Point(Vec c, ManifoldKind m) : coords(std::move(c)), manifold(m) {
    if (coords.size() != manifold.ambient_dim())
      throw DomainError("point coordinate size mismatch");
    check_on_manifold();
  }

  double constraint_violation() const {
    switch (manifold.geometry) {
      case Geometry::Sphere: return std::abs(coords.norm() - 1.0);
      case Geometry::Hyperbolic:
        return std::abs(minkowski_dot(coords, coords) + 1.0);
      default: return 0.0;
    }
  }

 private:
  void check_on_manifold() const {
    if (constraint_violation() > 1e-9)
      throw DomainError("coordinates violate the manifold constraint");
    if (manifold.geometry == Geometry::Hyperbolic && coords(0) <= 0.0)
      throw DomainError("hyperboloid point must have x0 > 0");
  }
};

struct TangentVector {
  Point base;
  Vec vec;

  TangentVector(Point b, Vec v) : base(std::move(b)), vec(std::move(v)) {
    if (vec.size() != base.coords.size())
      throw DomainError("tangent vector size mismatch");
  }

  double norm() const {
    if (base.manifold.geometry == Geometry::Hyperbolic) {
      double sq = minkowski_dot(vec, vec);
      return sq <= 0.0 ? 0.0 : std::sqrt(sq);
    }
    return vec.norm();
  }
};

// Hessian of the half squared distance, as a symmetric operator on the
// embedding chart. For the hyperboloid the stored matrix is the lowered
// (index-down) bilinear form, so v^T matrix w is the Hessian form for
// tangent v, w on every geometry.
struct HessianOperator {
  Mat matrix;
  Point base;
};

// ---------------------------------------------------------------------------
// Scale functions with series fallback near zero

// f(theta) = theta / sin(theta), >= 1 on [0, pi).
inline double sinc_scale(double theta) {
  if (std::abs(theta) < 1e-4) {
    double t2 = theta * theta;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return theta / std::sin(theta);
}

// f_*(theta) = theta / sinh(theta), in (0, 1].
inline double sinhc_scale(double theta) {
  if (std::abs(theta) < 1e-4) {
    double t2 = theta * theta;
    return 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return theta / std::sinh(theta);
}

// theta * cot(theta), continuous extension 1 at zero.
inline double theta_cot(double theta) {
  if (std::abs(theta) < 1e-4) return 1.0 - theta * theta / 3.0;
  return theta * std::cos(theta) / std::sin(theta);
}

// theta * coth(theta), continuous extension 1 at zero.
inline double theta_coth(double theta) {
  if (std::abs(theta) < 1e-4) return 1.0 + theta * theta / 3.0;
  return theta * std::cosh(theta) / std::sinh(theta);
}

namespace detail {

inline void require_same_manifold(const Point& x, const Point& y) {
  if (x.manifold != y.manifold)
    throw DomainError("points live on different manifolds");
}

inline double clamped_acos(double c) {
  if (c > 1.0) {
    if (c > 1.0 + 1e-12) throw DomainError("acos argument out of range");
    c = 1.0;
  }
  if (c < -1.0) {
    if (c < -1.0 - 1e-12) throw DomainError("acos argument out of range");
    c = -1.0;
  }
  return std::acos(c);
}

// arccosh with the sqrt-based expansion near 1 to avoid cancellation.
inline double clamped_acosh(double c) {
  if (c < 1.0) {
    if (c < 1.0 - 1e-12) throw DomainError("acosh argument out of range");
    c = 1.0;
  }
  if (c < 1.0 + 1e-12) return std::sqrt(2.0 * (c - 1.0));
  return std::acosh(c);
}

inline Point renormalized(Vec v, ManifoldKind m) {
  switch (m.geometry) {
    case Geometry::Sphere: return Point(v / v.norm(), m);
    case Geometry::Hyperbolic: {
      double s = -minkowski_dot(v, v);
      if (s <= 0.0) throw DomainError("vector is not timelike");
      v /= std::sqrt(s);
      if (v(0) < 0.0) v = -v;
      return Point(std::move(v), m);
    }
    default: return Point(std::move(v), m);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distances and cut-locus guard

inline double dist(const Point& x, const Point& y) {
  detail::require_same_manifold(x, y);
  switch (x.manifold.geometry) {
    case Geometry::Sphere:
      return detail::clamped_acos(x.coords.dot(y.coords));
    case Geometry::Hyperbolic:
      return detail::clamped_acosh(-minkowski_dot(x.coords, y.coords));
    default:
      return (x.coords - y.coords).norm();
  }
}

// Distance to the cut locus of x seen from y: pi - dist on spheres,
// +infinity where there is no cut locus.
inline double cut_locus_clearance(const Point& x, const Point& y) {
  detail::require_same_manifold(x, y);
  if (x.manifold.geometry == Geometry::Sphere) return kPi - dist(x, y);
  return std::numeric_limits<double>::infinity();
}

namespace detail {
inline void require_off_cut_locus(const Point& x, const Point& y) {
  if (cut_locus_clearance(x, y) < 1e-8)
    throw CutLocusError("point lies at the cut locus of the base point");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Exponential and logarithm maps

inline Point exp(const Point& x, const TangentVector& v) {
  if (&v.base != &x) {
    if (v.base.manifold != x.manifold ||
        (v.base.coords - x.coords).norm() > 1e-9)
      throw DomainError("tangent vector is not based at the given point");
  }
  double t = v.norm();
  switch (x.manifold.geometry) {
    case Geometry::Sphere: {
      if (t < 1e-300) return x;
      Vec c = std::cos(t) * x.coords + std::sin(t) * v.vec / t;
      return detail::renormalized(std::move(c), x.manifold);
    }
    case Geometry::Hyperbolic: {
      if (t < 1e-300) return x;
      Vec c = std::cosh(t) * x.coords + std::sinh(t) * v.vec / t;
      return detail::renormalized(std::move(c), x.manifold);
    }
    default:
      return Point(x.coords + v.vec, x.manifold);
  }
}

inline TangentVector log(const Point& x, const Point& y) {
  detail::require_same_manifold(x, y);
  switch (x.manifold.geometry) {
    case Geometry::Sphere: {
      detail::require_off_cut_locus(x, y);
      double theta = dist(x, y);
      Vec v = sinc_scale(theta) * (y.coords - std::cos(theta) * x.coords);
      // exact tangency
      v -= v.dot(x.coords) * x.coords;
      return TangentVector(x, std::move(v));
    }
    case Geometry::Hyperbolic: {
      double theta = dist(x, y);
      Vec v = sinhc_scale(theta) * (y.coords - std::cosh(theta) * x.coords);
      v += minkowski_dot(v, x.coords) * x.coords;
      return TangentVector(x, std::move(v));
    }
    default:
      return TangentVector(x, y.coords - x.coords);
  }
}

// grad of dist^2(., y) at x, equal to -2 log_x(y).
inline TangentVector grad_dist_sq(const Point& x, const Point& y) {
  TangentVector l = log(x, y);
  l.vec *= -2.0;
  return l;
}

// ---------------------------------------------------------------------------
// Tangent frames

// Columns form an orthonormal basis of T_x M expressed in the embedding
// chart (J-orthonormal on the hyperboloid). Euclidean: identity.
inline Mat tangent_basis(const Point& x) {
  int a = x.manifold.ambient_dim();
  int n = x.manifold.dim;
  switch (x.manifold.geometry) {
    case Geometry::Sphere: {
      // Householder completion of x to an orthonormal basis of R^{n+1}.
      Eigen::HouseholderQR<Mat> qr(x.coords);
      Mat q = qr.householderQ();
      Mat basis = q.rightCols(n);
      return basis;
    }
    case Geometry::Hyperbolic: {
      Mat basis(a, n);
      int col = 0;
      for (int i = 0; i < a && col < n; ++i) {
        Vec w = Vec::Zero(a);
        w(i) = 1.0;
        // project onto the tangent space
        w += minkowski_dot(w, x.coords) * x.coords;
        // Minkowski Gram-Schmidt (positive definite on the tangent space)
        for (int j = 0; j < col; ++j)
          w -= minkowski_dot(w, basis.col(j)) * basis.col(j);
        double nn = minkowski_dot(w, w);
        if (nn < 1e-12) continue;
        basis.col(col++) = w / std::sqrt(nn);
      }
      if (col != n) throw DomainError("tangent basis construction failed");
      return basis;
    }
    default:
      return Mat::Identity(n, n);
  }
}

// Metric pairing of two tangent vectors at the same base point.
inline double tangent_dot(const ManifoldKind& m, const Vec& v, const Vec& w) {
  if (m.geometry == Geometry::Hyperbolic) return minkowski_dot(v, w);
  return v.dot(w);
}

// ---------------------------------------------------------------------------
// Hessian of the half squared distance

// Closed forms: sphere  u u^T + theta*cot(theta) (Id - xx^T - uu^T),
//               hyperboloid  J(u u^T + theta*coth(theta)(J + xx^T - uu^T))J,
//               euclidean  Id.
// Continuous extension at x == y: identity on the tangent space.
inline HessianOperator hessian_dist_sq(const Point& x, const Point& y) {
  detail::require_same_manifold(x, y);
  int a = x.manifold.ambient_dim();
  switch (x.manifold.geometry) {
    case Geometry::Sphere: {
      detail::require_off_cut_locus(x, y);
      double theta = dist(x, y);
      Mat tangent_proj =
          Mat::Identity(a, a) - x.coords * x.coords.transpose();
      if (theta < 1e-9) return {tangent_proj, x};
      Vec u = log(x, y).vec / theta;
      Mat h = u * u.transpose() +
              theta_cot(theta) * (tangent_proj - u * u.transpose());
      return {std::move(h), x};
    }
    case Geometry::Hyperbolic: {
      double theta = dist(x, y);
      Mat J = minkowski_J(a);
      Mat core = J + x.coords * x.coords.transpose();
      if (theta < 1e-9) return {Mat(J * core * J), x};
      Vec u = log(x, y).vec / theta;
      Mat h = J *
              (u * u.transpose() +
               theta_coth(theta) * (core - u * u.transpose())) *
              J;
      return {std::move(h), x};
    }
    default:
      return {Mat::Identity(a, a), x};
  }
}

// Hessian restricted to an orthonormal tangent basis (n x n, symmetric).
inline Mat hessian_in_tangent_basis(const HessianOperator& h, const Mat& basis) {
  return basis.transpose() * h.matrix * basis;
}

// ---------------------------------------------------------------------------
// Curvature-truncated differential of the log

// Second-order truncation of D_x log_x(y) in an orthonormal normal chart at
// x: -Id + (kappa/3)(theta^2 Id - l l^T) with l the chart coordinates of
// log_x(y). The third-order curvature-gradient term vanishes on constant
// curvature spaces. Returned as an n x n matrix in the tangent_basis frame.
inline Mat taylor_dlog(const Point& x, const Point& y) {
  detail::require_same_manifold(x, y);
  int n = x.manifold.dim;
  Mat basis = tangent_basis(x);
  TangentVector l = log(x, y);
  Vec lc(n);
  for (int i = 0; i < n; ++i)
    lc(i) = tangent_dot(x.manifold, basis.col(i), l.vec);
  double kappa = x.manifold.curvature();
  double theta2 = lc.squaredNorm();
  return -Mat::Identity(n, n) +
         (kappa / 3.0) * (theta2 * Mat::Identity(n, n) - lc * lc.transpose());
}

}  // namespace bsa
