#pragma once

// Exponential barycentric subspaces: Z(x) and Omega(x), membership and dual
// weights, closed-form affine-span projection on constant-curvature spaces,
// weighted-variance Hessian and critical-point classification, weighted
// Frechet means, p-variance reparametrization and the restricted-geodesic
// limit diagnostic.

#include <algorithm>
#include <utility>
#include <vector>

#include "bsa/hyperbolic.hpp"
#include "bsa/manifold.hpp"
#include "bsa/sphere.hpp"

namespace bsa {

struct ReferenceCoincidenceError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Reference configurations and weights

// Affine independence per the tangent-vector definition: for every i, the
// vectors {log_{x_i}(x_j)}_{j != i} are linearly independent.
inline bool affinely_independent_tangent(const std::vector<Point>& pts,
                                         double tol = 1e-9) {
  const int k = int(pts.size()) - 1;
  if (k < 0) return false;
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j)
      if (j != i && cut_locus_clearance(pts[i], pts[j]) < 1e-8) return false;
    if (k == 0) continue;
    Mat logs(pts[i].coords.size(), k);
    int col = 0;
    for (int j = 0; j <= k; ++j)
      if (j != i) logs.col(col++) = log(pts[i], pts[j]).vec;
    Eigen::JacobiSVD<Mat> svd(logs);
    if (svd.singularValues()(k - 1) < tol * svd.singularValues()(0))
      return false;
  }
  return true;
}

// On the sphere / hyperboloid, equivalently rank(X) = k+1.
inline bool affinely_independent_rank(const Mat& refs, double tol = 1e-9) {
  Eigen::JacobiSVD<Mat> svd(refs);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > tol * s(0);
}

struct ReferenceConfiguration {
  std::vector<Point> points;
  ManifoldKind manifold;

  ReferenceConfiguration(std::vector<Point> pts)
      : points(std::move(pts)), manifold(require_manifold(points)) {
    if (!affinely_independent_tangent(points))
      throw DomainError("reference points are not affinely independent");
  }

  // Degenerate configurations (affinely dependent, antipodal pairs) are
  // still useful for diagnostics; skip validation.
  static ReferenceConfiguration unchecked(std::vector<Point> pts) {
    ReferenceConfiguration cfg(Unchecked{}, std::move(pts));
    return cfg;
  }

  int k() const { return int(points.size()) - 1; }

  // Embedding coordinate matrix X = [x_0 ... x_k].
  Mat matrix() const {
    Mat refs(points.front().coords.size(), points.size());
    for (size_t i = 0; i < points.size(); ++i) refs.col(i) = points[i].coords;
    return refs;
  }

 private:
  struct Unchecked {};
  ReferenceConfiguration(Unchecked, std::vector<Point> pts)
      : points(std::move(pts)), manifold(require_manifold(points)) {}

  static ManifoldKind require_manifold(const std::vector<Point>& pts) {
    if (pts.empty()) throw DomainError("empty reference configuration");
    for (const auto& p : pts)
      if (p.manifold != pts.front().manifold)
        throw DomainError("mixed-manifold reference configuration");
    return pts.front().manifold;
  }
};

// Normalized weights lambda_i / sum(lambda).
inline Vec normalize_weights(const Vec& lambda) {
  double mass = lambda.sum();
  if (std::abs(mass) <= 1e-12 * lambda.norm())
    throw ZeroMassError("weights sum to zero");
  return lambda / mass;
}

// Generic first moment M1(x, lambda) = sum_i lambda_i log_x(x_i).
inline TangentVector first_moment(const ReferenceConfiguration& refs,
                                  const Point& x, const Vec& lambda) {
  Vec m = Vec::Zero(x.coords.size());
  for (int i = 0; i <= refs.k(); ++i)
    m += lambda(i) * log(x, refs.points[i]).vec;
  return TangentVector(x, std::move(m));
}

// ---------------------------------------------------------------------------
// Z(x), Omega(x) and EBS membership

// Z(x) = [log_x(x_0) ... log_x(x_k)] in an orthonormal tangent basis at x.
// Returns the n x (k+1) coordinate matrix together with the basis used.
struct ZMatrix {
  Mat z;      // n x (k+1)
  Mat basis;  // ambient x n, orthonormal tangent frame
};

inline ZMatrix z_matrix(const ReferenceConfiguration& refs, const Point& x) {
  Mat basis = tangent_basis(x);
  Mat z(x.manifold.dim, refs.k() + 1);
  for (int i = 0; i <= refs.k(); ++i) {
    Vec l = log(x, refs.points[i]).vec;
    for (int r = 0; r < z.rows(); ++r)
      z(r, i) = tangent_dot(x.manifold, basis.col(r), l);
  }
  return {std::move(z), std::move(basis)};
}

struct EBSMembership {
  Point point;
  double smallest_singular_value;
  double largest_singular_value;
  std::vector<Vec> dual_basis;  // right singular vectors of vanishing values
  bool is_member;
};

// Default relative singular-value threshold, with an absolute floor.
inline double rank_threshold(double s_max, double tol = 1e-8) {
  return std::max(1e-9, tol * s_max);
}

inline EBSMembership ebs_membership(const ReferenceConfiguration& refs,
                                    const Point& x, double tol = 1e-8) {
  ZMatrix zm = z_matrix(refs, x);
  Eigen::JacobiSVD<Mat> svd(zm.z, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int nsv = int(s.size());  // min(n, k+1)
  double s_max = s(0);
  // columns of V beyond the row count of Z are exact kernel directions
  double smallest = (refs.k() + 1 <= nsv) ? s(nsv - 1) : 0.0;
  double cut = rank_threshold(s_max, tol);
  std::vector<Vec> dual;
  for (int i = 0; i < refs.k() + 1; ++i) {
    double sv = (i < nsv) ? s(i) : 0.0;
    if (sv < cut) dual.push_back(svd.matrixV().col(i));
  }
  return EBSMembership{x, smallest, s_max, std::move(dual), !dual.empty()};
}

struct OmegaMatrix {
  Mat omega;  // (k+1) x (k+1) Gram matrix Z^T Z
  double det;
};

inline OmegaMatrix omega_matrix(const ReferenceConfiguration& refs,
                                const Point& x) {
  Mat z = z_matrix(refs, x).z;
  Mat omega = z.transpose() * z;
  return {omega, omega.determinant()};
}

// ---------------------------------------------------------------------------
// Weighted variance and its Hessian

// sigma^2(x, lambda) = 1/2 sum_i lambda_i dist^2(x, x_i) / sum_j lambda_j.
inline double weighted_variance(const ReferenceConfiguration& refs,
                                const Point& x, const Vec& lambda) {
  Vec w = normalize_weights(lambda);
  double v = 0.0;
  for (int i = 0; i <= refs.k(); ++i) {
    double d = dist(x, refs.points[i]);
    if (refs.manifold.geometry == Geometry::Sphere &&
        kPi - d < 1e-8)
      throw CutLocusError("variance evaluated at a reference cut locus");
    v += 0.5 * w(i) * d * d;
  }
  return v;
}

// Hessian of the weighted variance as a symmetric operator on the embedding
// chart (lowered form on the hyperboloid): sum_i lambda_i Hess(1/2 d_i^2).
inline HessianOperator weighted_variance_hessian(
    const ReferenceConfiguration& refs, const Point& x, const Vec& lambda) {
  Vec w = normalize_weights(lambda);
  int a = x.manifold.ambient_dim();
  Mat h = Mat::Zero(a, a);
  for (int i = 0; i <= refs.k(); ++i)
    h += w(i) * hessian_dist_sq(x, refs.points[i]).matrix;
  return {std::move(h), x};
}

// Tangent-space spectrum of the weighted-variance Hessian, ascending.
inline Vec weighted_hessian_spectrum(const ReferenceConfiguration& refs,
                                     const Point& x, const Vec& lambda) {
  HessianOperator h = weighted_variance_hessian(refs, x, lambda);
  Mat ht = hessian_in_tangent_basis(h, tangent_basis(x));
  Eigen::SelfAdjointEigenSolver<Mat> eig(ht);
  return eig.eigenvalues();
}

// ---------------------------------------------------------------------------
// Critical-point classification

enum class CriticalClass { LocalMin, Saddle, Degenerate };

struct CriticalPointRecord {
  Point point;
  Vec weights;          // representative dual weight
  Mat hessian;          // tangent-space Hessian (n x n)
  Vec spectrum;         // ascending eigenvalues
  int index;            // count of positive eigenvalues
  CriticalClass cls;
};

inline const char* to_string(CriticalClass c) {
  switch (c) {
    case CriticalClass::LocalMin: return "local_min";
    case CriticalClass::Saddle: return "saddle";
    default: return "degenerate";
  }
}

// Classification of a single weight vector at an EBS point.
inline CriticalPointRecord classify_weights(const ReferenceConfiguration& refs,
                                            const Point& x, const Vec& lambda,
                                            double tol = 1e-7) {
  HessianOperator h = weighted_variance_hessian(refs, x, lambda);
  Mat ht = hessian_in_tangent_basis(h, tangent_basis(x));
  Eigen::SelfAdjointEigenSolver<Mat> eig(ht);
  Vec spec = eig.eigenvalues();
  double scale = std::max(spec.cwiseAbs().maxCoeff(), 1e-300);
  double cut = tol * scale;
  int index = 0;
  bool degenerate = false;
  for (int i = 0; i < spec.size(); ++i) {
    if (spec(i) > cut) ++index;
    if (std::abs(spec(i)) <= cut) degenerate = true;
  }
  CriticalClass cls = degenerate ? CriticalClass::Degenerate
                      : (index == spec.size() ? CriticalClass::LocalMin
                                              : CriticalClass::Saddle);
  return {x, lambda, std::move(ht), std::move(spec), index, cls};
}

// Classify an EBS point through its dual weight space. The generic case has
// a one-dimensional dual space; with several vanishing singular values the
// point is a local minimum only if every dual weight gives a positive
// definite Hessian, and degenerate if any weight gives a singular one.
inline CriticalPointRecord classify_ebs_point(const ReferenceConfiguration& refs,
                                              const Point& x,
                                              double tol = 1e-8) {
  EBSMembership m = ebs_membership(refs, x, tol);
  if (!m.is_member) throw NotOnEbsError("point is not on the EBS");
  std::vector<CriticalPointRecord> records;
  for (const Vec& lambda : m.dual_basis) {
    if (std::abs(lambda.sum()) <= 1e-12 * lambda.norm()) continue;
    records.push_back(classify_weights(refs, x, lambda));
  }
  if (records.empty())
    throw ZeroMassError("all dual weights have zero mass");
  CriticalPointRecord rec = records.front();
  for (const auto& r : records) {
    if (r.cls == CriticalClass::Degenerate) rec.cls = CriticalClass::Degenerate;
    else if (r.cls == CriticalClass::Saddle &&
             rec.cls != CriticalClass::Degenerate)
      rec.cls = CriticalClass::Saddle;
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Renormalized weights

// lambda~ = F(X,x) lambda: the diagonal rescaling that linearizes the EBS
// equation in the embedding space. Diagonal entries f(theta_i) on the
// sphere, f*(theta_i) on the hyperboloid, 1 in Euclidean space.
inline Vec renormalization_diagonal(const ReferenceConfiguration& refs,
                                    const Point& x) {
  Vec f(refs.k() + 1);
  for (int i = 0; i <= refs.k(); ++i) {
    double theta = dist(x, refs.points[i]);
    switch (refs.manifold.geometry) {
      case Geometry::Sphere:
        if (kPi - theta < 1e-8)
          throw CutLocusError("renormalization at a reference cut locus");
        f(i) = sinc_scale(theta);
        break;
      case Geometry::Hyperbolic: f(i) = sinhc_scale(theta); break;
      default: f(i) = 1.0; break;
    }
  }
  return f;
}

inline Vec to_renormalized_weights(const ReferenceConfiguration& refs,
                                   const Point& x, const Vec& lambda) {
  return renormalization_diagonal(refs, x).cwiseProduct(lambda);
}

inline Vec from_renormalized_weights(const ReferenceConfiguration& refs,
                                     const Point& x, const Vec& lambda_tilde) {
  return lambda_tilde.cwiseQuotient(renormalization_diagonal(refs, x));
}

// ---------------------------------------------------------------------------
// Closed-form affine-span projection (Thm. 7 / hyperbolic span)

struct ProjectionResult {
  Point closest;
  double residual;
  Vec weights;  // barycentric weights of the closest point, 1^T w = 1
};

namespace detail {

// Barycentric weights of an on-span point: solve X lt = closest in the
// least-squares sense, undo the renormalization, normalize the mass.
inline Vec recover_weights(const ReferenceConfiguration& refs,
                           const Point& closest) {
  Mat refmat = refs.matrix();
  Vec lt = refmat.colPivHouseholderQr().solve(closest.coords);
  Vec lambda = from_renormalized_weights(refs, closest, lt);
  double mass = lambda.sum();
  if (std::abs(mass) > 1e-12 * lambda.norm()) lambda /= mass;
  return lambda;
}

}  // namespace detail

inline ProjectionResult affine_span_project(const ReferenceConfiguration& refs,
                                            const Point& y) {
  detail::require_same_manifold(refs.points.front(), y);
  Mat refmat = refs.matrix();
  switch (refs.manifold.geometry) {
    case Geometry::Sphere: {
      // orthonormal basis of Span(X)
      Eigen::HouseholderQR<Mat> qr(refmat);
      Mat q = Mat(qr.householderQ()).leftCols(refs.k() + 1);
      Vec p = q * (q.transpose() * y.coords);
      if (p.norm() < 1e-10)
        throw FocalPointError("query is orthogonal to the span");
      Point plus(p / p.norm(), refs.manifold);
      Point minus(-p / p.norm(), refs.manifold);
      Point closest = dist(y, plus) <= dist(y, minus) ? plus : minus;
      double res = dist(y, closest);
      Vec w = detail::recover_weights(refs, closest);
      return {std::move(closest), res, std::move(w)};
    }
    case Geometry::Hyperbolic: {
      // minimize -<x, y>_* over x = B c with c^T (B^T J B) c = -1
      Eigen::HouseholderQR<Mat> qr(refmat);
      Mat b = Mat(qr.householderQ()).leftCols(refs.k() + 1);
      Mat jb = b.transpose() * minkowski_J(int(y.coords.size())) * b;
      Vec rhs = b.transpose() *
                (minkowski_J(int(y.coords.size())) * y.coords);
      Vec c = jb.colPivHouseholderQr().solve(rhs);
      Vec p = b * c;
      double sq = minkowski_dot(p, p);
      if (sq >= -1e-12)
        throw FocalPointError("query does not project onto the span");
      Point closest = detail::renormalized(std::move(p), refs.manifold);
      double res = dist(y, closest);
      Vec w = detail::recover_weights(refs, closest);
      return {std::move(closest), res, std::move(w)};
    }
    default: {
      const Vec& x0 = refs.points.front().coords;
      Mat dirs(x0.size(), refs.k());
      for (int i = 1; i <= refs.k(); ++i)
        dirs.col(i - 1) = refmat.col(i) - x0;
      Vec p = x0;
      if (refs.k() > 0) {
        Eigen::HouseholderQR<Mat> qr(dirs);
        Mat q = Mat(qr.householderQ()).leftCols(refs.k());
        p += q * (q.transpose() * (y.coords - x0));
      }
      Point closest(std::move(p), refs.manifold);
      double res = dist(y, closest);
      // affine weights: X w = closest with 1^T w = 1
      Mat aug(x0.size() + 1, refs.k() + 1);
      aug.topRows(x0.size()) = refmat;
      aug.bottomRows(1).setOnes();
      Vec rhs(x0.size() + 1);
      rhs.head(x0.size()) = closest.coords;
      rhs(x0.size()) = 1.0;
      Vec w = aug.colPivHouseholderQr().solve(rhs);
      return {std::move(closest), res, std::move(w)};
    }
  }
}

// ---------------------------------------------------------------------------
// Weighted Frechet mean and the barycentric simplex

// Riemannian gradient descent on the weighted variance, Gauss-Newton step
// tau = 1 halved on non-decrease.
inline Point weighted_frechet_mean(const ReferenceConfiguration& refs,
                                   const Vec& lambda,
                                   std::optional<Point> x_init = {},
                                   int max_iter = 1000, double tol = 1e-10) {
  if ((lambda.array() <= 0.0).any())
    throw DomainError("weighted_frechet_mean requires positive weights");
  if (refs.manifold.geometry == Geometry::Sphere) {
    for (size_t i = 0; i < refs.points.size(); ++i)
      for (size_t j = i + 1; j < refs.points.size(); ++j)
        if (dist(refs.points[i], refs.points[j]) >= kPi / 2)
          throw DomainError("reference points exceed the regular-ball bound");
  }
  Vec w = normalize_weights(lambda);
  Point x = x_init ? *x_init : refs.points.front();
  double value = weighted_variance(refs, x, w);
  double tau = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    TangentVector g = first_moment(refs, x, w);
    if (g.norm() < tol) return x;
    TangentVector step(x, tau * g.vec);
    Point next = exp(x, step);
    double next_value = weighted_variance(refs, next, w);
    if (next_value <= value + 1e-15) {
      x = next;
      value = next_value;
      tau = std::min(1.0, tau * 2.0);
    } else {
      tau *= 0.5;
      if (tau < 1e-6)
        throw NonConvergenceError("step size collapsed before convergence");
    }
  }
  throw NonConvergenceError("weighted Frechet mean did not converge");
}

// Derivative of the weighted Frechet mean with respect to the weights,
// D_lambda x_lambda = H^{-1} Z, in the orthonormal tangent basis at x.
inline Mat simplex_derivative(const ReferenceConfiguration& refs,
                              const Vec& lambda, const Point& x_lambda) {
  ZMatrix zm = z_matrix(refs, x_lambda);
  HessianOperator h = weighted_variance_hessian(refs, x_lambda, lambda);
  // the implicit-function balance uses the unnormalized weight sum, while
  // weighted_variance_hessian divides by the total mass
  Mat ht = lambda.sum() * hessian_in_tangent_basis(h, zm.basis);
  Eigen::FullPivLU<Mat> lu(ht);
  if (!lu.isInvertible())
    throw DegenerateHessianError("weighted-variance Hessian is singular");
  return lu.solve(zm.z);
}

// ---------------------------------------------------------------------------
// p-variance reparametrization

struct PVarianceGradient {
  TangentVector gradient;
  Vec reweighted;  // lambda'_i = lambda_i dist^{p-2}(x, x_i)
};

inline PVarianceGradient p_variance_gradient(const ReferenceConfiguration& refs,
                                             const Point& x, const Vec& lambda,
                                             double p) {
  if (p < 1.0) throw DomainError("p-variance requires p >= 1");
  Vec w = normalize_weights(lambda);
  Vec reweighted(lambda.size());
  Vec g = Vec::Zero(x.coords.size());
  for (int i = 0; i <= refs.k(); ++i) {
    double d = dist(x, refs.points[i]);
    if (p < 2.0 && d < 1e-12)
      throw ReferenceCoincidenceError(
          "p-variance gradient undefined at a reference point for p < 2");
    double scale = (d < 1e-300) ? 0.0 : std::pow(d, p - 2.0);
    reweighted(i) = lambda(i) * scale;
    g -= w(i) * scale * log(x, refs.points[i]).vec;
  }
  return {TangentVector(x, std::move(g)), std::move(reweighted)};
}

// ---------------------------------------------------------------------------
// Restricted-geodesic-limit diagnostic (affine spans of coalescing points)

struct RgsLimitReport {
  std::vector<double> eps;
  std::vector<double> max_residual;  // over the GS*(W) sample grid
};

inline RgsLimitReport rgs_limit_check(const Point& x0,
                                      const std::vector<Vec>& w,
                                      const std::vector<double>& eps_list,
                                      int grid_per_dim = 5,
                                      double alpha_range = 1.0) {
  if (w.empty()) throw DomainError("need at least one tangent direction");
  // sample GS*(W) on a grid of tangent coefficients
  std::vector<Point> samples;
  int k = int(w.size());
  std::vector<int> idx(k, 0);
  for (;;) {
    Vec v = Vec::Zero(x0.coords.size());
    for (int i = 0; i < k; ++i) {
      double a = -alpha_range +
                 2.0 * alpha_range * idx[i] / std::max(1, grid_per_dim - 1);
      v += a * w[i];
    }
    samples.push_back(exp(x0, TangentVector(x0, v)));
    int d = 0;
    while (d < k && ++idx[d] == grid_per_dim) idx[d++] = 0;
    if (d == k) break;
  }
  RgsLimitReport report;
  for (double eps : eps_list) {
    std::vector<Point> refs_pts = {x0};
    for (const Vec& wi : w)
      refs_pts.push_back(exp(x0, TangentVector(x0, eps * wi)));
    ReferenceConfiguration refs(std::move(refs_pts));
    double worst = 0.0;
    for (const Point& s : samples)
      worst = std::max(worst, affine_span_project(refs, s).residual);
    report.eps.push_back(eps);
    report.max_residual.push_back(worst);
  }
  return report;
}

}  // namespace bsa
