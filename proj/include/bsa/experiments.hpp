#pragma once

// Experiment drivers: equilateral-triangle dataset generation, planar-triad
// shape ingestion, Hessian-signature sweeps on S^2 / H^2 grids and the
// analysis dispatcher.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bsa/io.hpp"

namespace bsa {

// ---------------------------------------------------------------------------
// Equilateral-triangle dataset on a great 2-subsphere

// Three unit vectors in the first three coordinates with pairwise geodesic
// distance `side`, from the Cholesky factor of the Gram matrix.
inline std::vector<Point> equilateral_vertices(int ambient_dim, double side) {
  if (ambient_dim < 3) throw DomainError("ambient_dim must be >= 3");
  if (side <= 0.0 || side >= 2.0 * kPi / 3.0)
    throw DomainError("side must be in (0, 2*pi/3)");
  double c = std::cos(side);
  Eigen::Matrix3d gram;
  gram << 1, c, c, c, 1, c, c, c, 1;
  Eigen::LLT<Eigen::Matrix3d> llt(gram);
  if (llt.info() != Eigen::Success)
    throw DomainError("side length yields a non-realizable triangle");
  Eigen::Matrix3d l = llt.matrixL();
  ManifoldKind m = ManifoldKind::sphere(ambient_dim - 1);
  std::vector<Point> vertices;
  for (int i = 0; i < 3; ++i) {
    Vec v = Vec::Zero(ambient_dim);
    v.head(3) = l.row(i).transpose();
    vertices.push_back(Point(v / v.norm(), m));
  }
  return vertices;
}

// Uniform samples from the spherical triangle plus isotropic wrapped
// Gaussian noise of standard deviation sigma (radians) in the full ambient
// tangent space.
inline Dataset generate_equi(int n_points = 30, int ambient_dim = 6,
                             double side = kPi / 2,
                             double sigma = 10.0 * kPi / 180.0,
                             std::uint64_t seed = 0) {
  std::vector<Point> v = equilateral_vertices(ambient_dim, side);
  std::mt19937_64 rng(seed);
  Dataset ds{v.front().manifold, {}, std::nullopt, seed, {}};
  ds.comments.push_back("equilateral spherical triangle samples");
  ds.comments.push_back("side_rad: " + detail::format_g17(side));
  ds.comments.push_back("sigma_rad: " + detail::format_g17(sigma));
  for (int i = 0; i < n_points; ++i) {
    Point p = uniform_triangle_sample(v[0], v[1], v[2], rng);
    ds.points.push_back(wrapped_gaussian_sample(p, sigma, rng));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Planar triad ingestion (triangle shapes on the unit 2-sphere)

// Input rows: x1,y1,x2,y2,x3,y3 per record, '#' comments allowed.
inline Dataset load_triangle_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open: " + path);
  Dataset ds{ManifoldKind::sphere(2), {}, 2.0, std::nullopt, {}};
  ds.comments.push_back("triangle shapes via Helmert + Hopf embedding");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(detail::trim(cell)));
      } catch (const std::exception&) {
        throw DomainError("record at line " + std::to_string(lineno) +
                          ": malformed number '" + cell + "'");
      }
    }
    if (vals.size() != 6)
      throw DomainError("record at line " + std::to_string(lineno) +
                        ": expected 6 values, got " +
                        std::to_string(vals.size()));
    try {
      TriangleShape s = kendall_shape_of_triangle(
          {vals[0], vals[1]}, {vals[2], vals[3]}, {vals[4], vals[5]});
      ds.points.push_back(s.point);
    } catch (const DomainError& e) {
      throw DomainError("record at line " + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Signature maps

struct SignatureRow {
  Vec coords;
  double smallest_singular_value;
  int index;             // -1 when classification is not defined there
  std::string cls;       // local_min | saddle | degenerate | excluded
  int grid_i, grid_j;
};

struct SignatureMap {
  std::vector<SignatureRow> rows;
  int ni, nj;
  bool wrap_i;  // first grid axis is periodic (sphere azimuth)
};

namespace detail {

inline SignatureRow classify_grid_point(const ReferenceConfiguration& refs,
                                        const Point& x, int i, int j) {
  SignatureRow row{x.coords, 0.0, -1, "excluded", i, j};
  try {
    EBSMembership m = ebs_membership(refs, x);
    row.smallest_singular_value = m.smallest_singular_value;
    if (!m.is_member) return row;
    CriticalPointRecord rec = classify_ebs_point(refs, x);
    row.index = rec.index;
    row.cls = to_string(rec.cls);
  } catch (const Error&) {
    // cut locus of a reference point or zero-mass dual weights
  }
  return row;
}

}  // namespace detail

// Full-sphere sweep on S^2 (azimuth x polar cell centers).
inline SignatureMap sphere_signature_map(const ReferenceConfiguration& refs,
                                         int n_azimuth = 200,
                                         int n_polar = 100) {
  if (refs.manifold != ManifoldKind::sphere(2))
    throw DomainError("sphere signature map requires S^2 references");
  SignatureMap map{{}, n_azimuth, n_polar, true};
  for (int i = 0; i < n_azimuth; ++i) {
    double phi = 2.0 * kPi * (i + 0.5) / n_azimuth;
    for (int j = 0; j < n_polar; ++j) {
      double th = kPi * (j + 0.5) / n_polar;
      Vec c(3);
      c << std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi),
          std::cos(th);
      map.rows.push_back(detail::classify_grid_point(
          refs, Point(c / c.norm(), refs.manifold), i, j));
    }
  }
  return map;
}

// Weierstrass-box sweep on H^2.
inline SignatureMap hyperbolic_signature_map(const ReferenceConfiguration& refs,
                                             int n_per_axis = 200,
                                             double box = 3.0) {
  if (refs.manifold != ManifoldKind::hyperbolic(2))
    throw DomainError("hyperbolic signature map requires H^2 references");
  SignatureMap map{{}, n_per_axis, n_per_axis, false};
  for (int i = 0; i < n_per_axis; ++i) {
    double u = -box + 2.0 * box * (i + 0.5) / n_per_axis;
    for (int j = 0; j < n_per_axis; ++j) {
      double v = -box + 2.0 * box * (j + 0.5) / n_per_axis;
      Vec xh(2);
      xh << u, v;
      map.rows.push_back(
          detail::classify_grid_point(refs, from_weierstrass(xh), i, j));
    }
  }
  return map;
}

inline void save_signature_csv(const std::string& path,
                               const SignatureMap& map) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << "# columns: grid_i,grid_j,coords...,s_min,index,class\n";
  for (const auto& r : map.rows) {
    out << r.grid_i << "," << r.grid_j;
    for (int i = 0; i < r.coords.size(); ++i)
      out << "," << detail::format_g17(r.coords(i));
    out << "," << detail::format_g17(r.smallest_singular_value) << ","
        << r.index << "," << r.cls << "\n";
  }
}

// Connected components of the local-minimum region in the grid graph
// (4-neighbor adjacency, optional wrap on the first axis).
inline int local_min_components(const SignatureMap& map) {
  std::vector<int> label(map.rows.size(), -1);
  auto at = [&](int i, int j) { return i * map.nj + j; };
  auto is_min = [&](int idx) { return map.rows[idx].cls == "local_min"; };
  int comps = 0;
  std::vector<int> stack;
  for (size_t s = 0; s < map.rows.size(); ++s) {
    if (!is_min(int(s)) || label[s] >= 0) continue;
    ++comps;
    stack.push_back(int(s));
    label[s] = comps;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      int ci = cur / map.nj, cj = cur % map.nj;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        int ni = ci + di[d], nj = cj + dj[d];
        if (map.wrap_i) ni = (ni + map.ni) % map.ni;
        if (ni < 0 || ni >= map.ni || nj < 0 || nj >= map.nj) continue;
        int nxt = at(ni, nj);
        if (is_min(nxt) && label[nxt] < 0) {
          label[nxt] = comps;
          stack.push_back(nxt);
        }
      }
    }
  }
  return comps;
}

// ---------------------------------------------------------------------------
// Analysis dispatch

struct AnalysisRun {
  AnalysisResult result;
  std::optional<double> auv_closed_form;  // pca-flag only
};

inline AnalysisRun run_analysis(const Dataset& ds, const std::string& method,
                                int k, long long budget, std::uint64_t seed) {
  AnalysisRun run;
  if (method == "fbs") {
    run.result = forward_bsa(ds.points, k);
    run.result.seed = seed;
  } else if (method == "pbs") {
    run.result = optimal_pure_subspace(ds.points, k, budget, seed);
  } else if (method == "bsa") {
    run.result = bsa_flag_search(ds.points, k, budget, seed);
  } else if (method == "pca-flag") {
    if (ds.manifold.geometry != Geometry::Euclidean)
      throw DomainError("pca-flag requires a Euclidean dataset");
    PcaFlagResult pca = euclidean_pca_flag(ds.points, k);
    run.result = pca.result;
    run.auv_closed_form = pca.auv_closed_form;
  } else {
    throw DomainError("unknown method: " + method);
  }
  return run;
}

inline void save_level_curve_csv(const std::string& path,
                                 const AnalysisResult& r) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << "# columns: level,unexplained_variance\n";
  for (size_t i = 0; i < r.per_level_unexplained_variance.size(); ++i)
    out << i << ","
        << detail::format_g17(r.per_level_unexplained_variance[i]) << "\n";
}

}  // namespace bsa
