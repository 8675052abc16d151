#pragma once

// Flags of affine spans and subspace analyses: unexplained variance, the
// accumulated-unexplained-variance (AUV) criterion, greedy forward search,
// exhaustive / budgeted pure-subspace and flag searches over data tuples,
// and the Euclidean PCA flag with its closed-form AUV.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bsa/barycentric.hpp"

namespace bsa {

struct DependentPointsError : Error {
  using Error::Error;
};
struct NoIndependentTupleError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Flags

// Ordered groups of indices into a reference-point pool. Order between
// groups is strict; points within a group are exchangeable. Prefixes of i
// groups define nested reference configurations.
struct Flag {
  std::vector<std::vector<int>> groups;
  std::vector<Point> pool;

  Flag(std::vector<std::vector<int>> g, std::vector<Point> p)
      : groups(std::move(g)), pool(std::move(p)) {
    std::set<int> seen;
    for (const auto& grp : groups) {
      if (grp.empty()) throw DomainError("empty flag group");
      for (int i : grp) {
        if (i < 0 || i >= int(pool.size()))
          throw DomainError("flag group index out of range");
        if (!seen.insert(i).second)
          throw DomainError("flag groups are not disjoint");
      }
    }
    if (groups.empty()) throw DomainError("flag has no groups");
  }

  // Strict flag: one singleton group per point, in order.
  static Flag strict(std::vector<Point> pts) {
    std::vector<std::vector<int>> g;
    for (int i = 0; i < int(pts.size()); ++i) g.push_back({i});
    return Flag(std::move(g), std::move(pts));
  }

  // Reference configuration spanned by the first `level + 1` groups.
  ReferenceConfiguration prefix(int level) const {
    std::vector<Point> pts;
    for (int g = 0; g <= level; ++g)
      for (int i : groups[g]) pts.push_back(pool[i]);
    return ReferenceConfiguration(std::move(pts));
  }
};

// ---------------------------------------------------------------------------
// Variance criteria (per-datum mean convention)

// sigma^2_out(X): mean squared projection residual of the data onto the
// affine span of X.
inline double unexplained_variance(const ReferenceConfiguration& refs,
                                   const std::vector<Point>& data) {
  if (data.empty()) throw InsufficientDataError("no data points");
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    try {
      double r = affine_span_project(refs, data[i]).residual;
      total += r * r;
    } catch (const FocalPointError& e) {
      throw FocalPointError("datum " + std::to_string(i) + ": " + e.what());
    }
  }
  return total / double(data.size());
}

// AUV(flag): sum over flag prefixes of the unexplained variance, each
// weighted by the number of points added at that step.
inline double auv(const Flag& flag, const std::vector<Point>& data) {
  double total = 0.0;
  for (int level = 0; level < int(flag.groups.size()); ++level)
    total += double(flag.groups[level].size()) *
             unexplained_variance(flag.prefix(level), data);
  return total;
}

// ---------------------------------------------------------------------------
// Analysis results

enum class Method { FBS, kPBS, kBSA, EuclideanPCA };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::FBS: return "fbs";
    case Method::kPBS: return "pbs";
    case Method::kBSA: return "bsa";
    default: return "pca-flag";
  }
}

struct AnalysisResult {
  Method method;
  int k = 0;
  std::vector<int> reference_indices;
  std::vector<double> per_level_unexplained_variance;
  double auv = 0.0;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  long long budget = 0;           // 0 = exhaustive
  long long tuples_evaluated = 0;
  long long tuples_skipped_dependent = 0;
  std::string variance_convention = "per_datum_mean";
};

namespace detail {

inline bool tuple_independent(const std::vector<Point>& data,
                              const std::vector<int>& idx) {
  std::vector<Point> pts;
  for (int i : idx) pts.push_back(data[i]);
  return affinely_independent_tangent(pts);
}

inline ReferenceConfiguration config_of(const std::vector<Point>& data,
                                        const std::vector<int>& idx) {
  std::vector<Point> pts;
  for (int i : idx) pts.push_back(data[i]);
  return ReferenceConfiguration::unchecked(std::move(pts));
}

// Memoized sigma^2_out keyed by the unordered index set.
struct PrefixVarianceCache {
  const std::vector<Point>& data;
  std::map<std::vector<int>, double> values;

  double operator()(const std::vector<int>& idx) {
    std::vector<int> key = idx;
    std::sort(key.begin(), key.end());
    auto it = values.find(key);
    if (it != values.end()) return it->second;
    double v = unexplained_variance(config_of(data, key), data);
    values.emplace(std::move(key), v);
    return v;
  }
};

inline double seconds_since(
    std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// All sorted (k+1)-subsets of {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> all_subsets(int n, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    out.push_back(idx);
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

inline long long binomial(int n, int r) {
  long long b = 1;
  for (int i = 0; i < r; ++i) b = b * (n - i) / (i + 1);
  return b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Forward analysis (greedy, sample-limited)

enum class SearchMode { SampleLimited };

// Level 0 picks the data point minimizing the mean squared distance to the
// data (sample-limited Frechet mean); each further level adds the candidate
// minimizing the unexplained variance with the predecessors held fixed.
inline AnalysisResult forward_bsa(const std::vector<Point>& data, int k,
                                  SearchMode = SearchMode::SampleLimited) {
  auto t0 = std::chrono::steady_clock::now();
  int n = int(data.size());
  if (n < k + 1)
    throw InsufficientDataError("need at least k+1 data points");
  AnalysisResult res;
  res.method = Method::FBS;
  res.k = k;

  int best0 = -1;
  double best0_v = 0.0;
  for (int c = 0; c < n; ++c) {
    double v = 0.0;
    for (const Point& y : data) {
      double d = dist(data[c], y);
      v += d * d;
    }
    v /= double(n);
    if (best0 < 0 || v < best0_v) {
      best0 = c;
      best0_v = v;
    }
  }
  res.reference_indices.push_back(best0);
  res.per_level_unexplained_variance.push_back(best0_v);
  res.tuples_evaluated += n;

  for (int level = 1; level <= k; ++level) {
    int best = -1;
    double best_v = 0.0;
    for (int c = 0; c < n; ++c) {
      if (std::find(res.reference_indices.begin(),
                    res.reference_indices.end(),
                    c) != res.reference_indices.end())
        continue;
      std::vector<int> idx = res.reference_indices;
      idx.push_back(c);
      if (!detail::tuple_independent(data, idx)) {
        ++res.tuples_skipped_dependent;
        continue;
      }
      double v = unexplained_variance(detail::config_of(data, idx), data);
      ++res.tuples_evaluated;
      if (best < 0 || v < best_v) {
        best = c;
        best_v = v;
      }
    }
    if (best < 0)
      throw NoIndependentTupleError(
          "no affinely independent extension at level " +
          std::to_string(level));
    res.reference_indices.push_back(best);
    res.per_level_unexplained_variance.push_back(best_v);
  }
  for (int level = 0; level <= k; ++level)
    res.auv += res.per_level_unexplained_variance[level];
  res.runtime_seconds = detail::seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Optimal pure subspace (unordered tuple search)

// Minimizes sigma^2_out over (k+1)-subsets of the data. Exhaustive when the
// subset count fits the budget (budget <= 0 means unlimited), uniform
// without replacement otherwise. Ties keep the lexicographically smallest
// sorted tuple.
inline AnalysisResult optimal_pure_subspace(const std::vector<Point>& data,
                                            int k, long long budget = 0,
                                            std::uint64_t seed = 0) {
  auto t0 = std::chrono::steady_clock::now();
  int n = int(data.size());
  if (n < k + 1)
    throw InsufficientDataError("need at least k+1 data points");
  AnalysisResult res;
  res.method = Method::kPBS;
  res.k = k;
  res.budget = budget;
  res.seed = seed;

  long long total = detail::binomial(n, k + 1);
  std::vector<std::vector<int>> candidates;
  if (budget <= 0 || total <= budget) {
    candidates = detail::all_subsets(n, k + 1);
  } else {
    std::mt19937_64 rng(seed);
    std::set<std::vector<int>> chosen;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    while (std::int64_t(chosen.size()) < budget) {
      std::vector<int> pick = all;
      std::shuffle(pick.begin(), pick.end(), rng);
      pick.resize(k + 1);
      std::sort(pick.begin(), pick.end());
      chosen.insert(std::move(pick));
    }
    candidates.assign(chosen.begin(), chosen.end());
  }

  bool found = false;
  double best_v = 0.0;
  for (const auto& idx : candidates) {
    if (!detail::tuple_independent(data, idx)) {
      ++res.tuples_skipped_dependent;
      continue;
    }
    double v = unexplained_variance(detail::config_of(data, idx), data);
    ++res.tuples_evaluated;
    if (!found || v < best_v) {
      found = true;
      best_v = v;
      res.reference_indices = idx;
    }
  }
  if (!found)
    throw NoIndependentTupleError("no affinely independent tuple found");
  res.per_level_unexplained_variance = {best_v};
  res.auv = double(k + 1) * best_v;
  res.runtime_seconds = detail::seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Flag search over ordered tuples (AUV minimization)

// Minimizes the AUV of the strict flag induced by an ordered (k+1)-tuple of
// data points. Prefix variances are memoized by their unordered index set.
inline AnalysisResult bsa_flag_search(const std::vector<Point>& data, int k,
                                      long long budget = 0,
                                      std::uint64_t seed = 0) {
  auto t0 = std::chrono::steady_clock::now();
  int n = int(data.size());
  if (n < k + 1)
    throw InsufficientDataError("need at least k+1 data points");
  AnalysisResult res;
  res.method = Method::kBSA;
  res.k = k;
  res.budget = budget;
  res.seed = seed;

  detail::PrefixVarianceCache cache{data, {}};

  long long total = 1;
  for (int i = 0; i < k + 1; ++i) total *= (n - i);
  std::vector<std::vector<int>> tuples;
  if (budget <= 0 || total <= budget) {
    // ordered tuples of distinct indices, lexicographic
    std::vector<bool> used(n, false);
    std::vector<int> stack;
    std::function<void()> rec = [&]() {
      if (int(stack.size()) == k + 1) {
        tuples.push_back(stack);
        return;
      }
      for (int c = 0; c < n; ++c) {
        if (used[c]) continue;
        used[c] = true;
        stack.push_back(c);
        rec();
        stack.pop_back();
        used[c] = false;
      }
    };
    rec();
  } else {
    std::mt19937_64 rng(seed);
    std::set<std::vector<int>> chosen;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    while (std::int64_t(chosen.size()) < budget) {
      std::vector<int> pick = all;
      std::shuffle(pick.begin(), pick.end(), rng);
      pick.resize(k + 1);
      chosen.insert(std::move(pick));
    }
    tuples.assign(chosen.begin(), chosen.end());
  }

  bool found = false;
  double best_auv = 0.0;
  std::vector<double> best_levels;
  for (const auto& idx : tuples) {
    if (!detail::tuple_independent(data, idx)) {
      ++res.tuples_skipped_dependent;
      continue;
    }
    std::vector<double> levels;
    double a = 0.0;
    for (int level = 0; level <= k; ++level) {
      std::vector<int> prefix(idx.begin(), idx.begin() + level + 1);
      double v = cache(prefix);
      levels.push_back(v);
      a += v;
    }
    ++res.tuples_evaluated;
    if (!found || a < best_auv) {
      found = true;
      best_auv = a;
      best_levels = std::move(levels);
      res.reference_indices = idx;
    }
  }
  if (!found)
    throw NoIndependentTupleError("no affinely independent tuple found");
  res.per_level_unexplained_variance = std::move(best_levels);
  res.auv = best_auv;
  res.runtime_seconds = detail::seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Affine QR decomposition (Euclidean)

// X = x0 1^T + Q T with q0 = 0, q1..qk orthonormal and T upper triangular
// with zero first row and column. Stable under appending columns: the
// decomposition of a prefix of X is the corresponding sub-block.
struct AffineQR {
  Point x0;
  Mat q;  // n x (k+1), first column zero
  Mat t;  // (k+1) x (k+1), upper triangular, zero first row/column
};

inline AffineQR qr_affine_decompose(const std::vector<Point>& pts) {
  if (pts.empty()) throw DomainError("empty configuration");
  if (pts.front().manifold.geometry != Geometry::Euclidean)
    throw DomainError("affine QR requires Euclidean points");
  int n = int(pts.front().coords.size());
  int k = int(pts.size()) - 1;
  Mat q = Mat::Zero(n, k + 1);
  Mat t = Mat::Zero(k + 1, k + 1);
  // modified Gram-Schmidt on the centered columns, prefix-stable
  for (int i = 1; i <= k; ++i) {
    Vec w = pts[i].coords - pts[0].coords;
    for (int j = 1; j < i; ++j) {
      double c = q.col(j).dot(w);
      t(j, i) = c;
      w -= c * q.col(j);
    }
    double nn = w.norm();
    if (nn < 1e-12)
      throw DependentPointsError("points are affinely dependent");
    t(i, i) = nn;
    q.col(i) = w / nn;
  }
  return {pts.front(), std::move(q), std::move(t)};
}

// ---------------------------------------------------------------------------
// Euclidean PCA flag

struct PcaFlagResult {
  AnalysisResult result;    // auv field = directly-summed route
  double auv_closed_form;   // sum_{i<=k} i s_i^2 + (k+1) sum_{i>k} s_i^2
  Vec eigenvalues;          // descending, per-datum covariance
  Mat eigenvectors;         // columns matching eigenvalues
  bool degenerate_spectrum; // repeated values among the top k+1
};

inline PcaFlagResult euclidean_pca_flag(const std::vector<Point>& data,
                                        int k) {
  auto t0 = std::chrono::steady_clock::now();
  if (data.empty()) throw InsufficientDataError("no data points");
  if (data.front().manifold.geometry != Geometry::Euclidean)
    throw DomainError("PCA flag requires Euclidean data");
  int n = int(data.front().coords.size());
  if (k < 0 || k > n) throw DomainError("k out of range");
  Vec mean = Vec::Zero(n);
  for (const Point& y : data) mean += y.coords;
  mean /= double(data.size());
  Mat cov = Mat::Zero(n, n);
  for (const Point& y : data) {
    Vec c = y.coords - mean;
    cov += c * c.transpose();
  }
  cov /= double(data.size());
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  Vec evals = eig.eigenvalues().reverse();
  Mat evecs = eig.eigenvectors().rowwise().reverse();

  bool degen = false;
  double scale = std::max(evals(0), 1e-300);
  for (int i = 0; i + 1 < std::min(k + 2, n); ++i)
    if (std::abs(evals(i) - evals(i + 1)) <= 1e-10 * scale) degen = true;

  std::vector<Point> pool;
  pool.emplace_back(mean, data.front().manifold);
  for (int i = 0; i < k; ++i)
    pool.emplace_back(Vec(mean + evecs.col(i)), data.front().manifold);
  Flag flag = Flag::strict(pool);

  PcaFlagResult out;
  out.result.method = Method::EuclideanPCA;
  out.result.k = k;
  for (int level = 0; level <= k; ++level)
    out.result.per_level_unexplained_variance.push_back(
        unexplained_variance(flag.prefix(level), data));
  out.result.auv = std::accumulate(
      out.result.per_level_unexplained_variance.begin(),
      out.result.per_level_unexplained_variance.end(), 0.0);
  double closed = 0.0;
  for (int i = 1; i <= k; ++i) closed += double(i) * evals(i - 1);
  for (int i = k + 1; i <= n; ++i) closed += double(k + 1) * evals(i - 1);
  out.auv_closed_form = closed;
  out.eigenvalues = std::move(evals);
  out.eigenvectors = std::move(evecs);
  out.degenerate_spectrum = degen;
  out.result.runtime_seconds = detail::seconds_since(t0);
  return out;
}

}  // namespace bsa
