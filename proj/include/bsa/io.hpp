#pragma once

// Dataset CSV files ('#'-prefixed header, 17-significant-digit rows,
// on-load constraint validation) and JSON result documents.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsa/flags.hpp"

namespace bsa {

struct Dataset {
  ManifoldKind manifold;
  std::vector<Point> points;
  std::optional<double> scale_tag;  // e.g. 2.0 for rescaled shape spheres
  std::optional<std::uint64_t> seed;
  std::vector<std::string> comments;  // free-form provenance lines
};

namespace detail {

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string geometry_name(Geometry g) {
  switch (g) {
    case Geometry::Sphere: return "sphere";
    case Geometry::Hyperbolic: return "hyperbolic";
    default: return "euclidean";
  }
}

inline Geometry geometry_from_name(const std::string& s) {
  if (s == "sphere") return Geometry::Sphere;
  if (s == "hyperbolic") return Geometry::Hyperbolic;
  if (s == "euclidean") return Geometry::Euclidean;
  throw DomainError("unknown manifold kind: " + s);
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << "# manifold: " << detail::geometry_name(ds.manifold.geometry) << "\n";
  out << "# ambient_dim: " << ds.manifold.ambient_dim() << "\n";
  if (ds.scale_tag)
    out << "# scale: " << detail::format_g17(*ds.scale_tag) << "\n";
  if (ds.seed) out << "# seed: " << *ds.seed << "\n";
  for (const auto& c : ds.comments) out << "# " << c << "\n";
  for (const Point& p : ds.points) {
    for (int i = 0; i < p.coords.size(); ++i) {
      if (i) out << ",";
      out << detail::format_g17(p.coords(i));
    }
    out << "\n";
  }
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open: " + path);
  std::optional<Geometry> geom;
  std::optional<int> ambient;
  std::optional<double> scale;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> comments;
  std::vector<Vec> rows;
  std::vector<int> row_lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string body = detail::trim(t.substr(1));
      auto colon = body.find(':');
      std::string key =
          colon == std::string::npos ? "" : detail::trim(body.substr(0, colon));
      std::string val =
          colon == std::string::npos ? "" : detail::trim(body.substr(colon + 1));
      if (key == "manifold") geom = detail::geometry_from_name(val);
      else if (key == "ambient_dim") ambient = std::stoi(val);
      else if (key == "scale") scale = std::stod(val);
      else if (key == "seed") seed = std::stoull(val);
      else comments.push_back(body);
      continue;
    }
    std::vector<double> vals;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(detail::trim(cell)));
      } catch (const std::exception&) {
        throw DomainError("row " + std::to_string(lineno) +
                          ": malformed number '" + cell + "'");
      }
    }
    Vec v(int(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(int(i)) = vals[i];
    rows.push_back(std::move(v));
    row_lines.push_back(lineno);
  }
  if (!geom) throw DomainError("missing '# manifold:' header");
  if (!ambient) throw DomainError("missing '# ambient_dim:' header");
  int dim = (*geom == Geometry::Euclidean) ? *ambient : *ambient - 1;
  ManifoldKind m(*geom, dim);
  Dataset ds{m, {}, scale, seed, std::move(comments)};
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.ambient_dim())
      throw DomainError("row " + std::to_string(row_lines[i]) +
                        ": expected " + std::to_string(m.ambient_dim()) +
                        " coordinates, got " + std::to_string(rows[i].size()));
    try {
      ds.points.emplace_back(std::move(rows[i]), m);
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(row_lines[i]) + ": " +
                        e.what());
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// JSON results

// Deterministic payload (keys sorted, timing isolated under "timing").
inline nlohmann::json result_to_json(const AnalysisResult& r) {
  nlohmann::json j;
  j["method"] = to_string(r.method);
  j["k"] = r.k;
  j["reference_indices"] = r.reference_indices;
  j["per_level_unexplained_variance"] = r.per_level_unexplained_variance;
  j["auv"] = r.auv;
  j["seed"] = r.seed;
  j["budget"] = r.budget;
  j["tuples_evaluated"] = r.tuples_evaluated;
  j["tuples_skipped_dependent"] = r.tuples_skipped_dependent;
  j["variance_convention"] = r.variance_convention;
  j["timing"] = {{"runtime_seconds", r.runtime_seconds}};
  return j;
}

inline void write_result(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace bsa
