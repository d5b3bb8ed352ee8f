#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdc/tensor.hpp"

namespace pdc {

enum class InitMode {
  KMeansPlusPlus,
  Random,
  /// Every K-subset of the distinct points seeds one Lloyd run; the lowest
  /// SSE wins. Only for small inputs.
  Exhaustive,
};

struct KMeansOptions {
  Index k = 1;
  std::uint64_t seed = 0;
  int max_iters = 100;
  InitMode init = InitMode::KMeansPlusPlus;
  /// One assignment pass followed by one centroid update, nothing more.
  bool single_pass = false;
  /// Independent initializations (k-means++ / random only); lowest SSE wins.
  int restarts = 1;
  int threads = 1;
};

/// Result of Lloyd's algorithm on weighted points. Centroids are the weighted
/// means of their members under `labels`, and every cluster is non-empty.
struct LloydResult {
  Eigen::MatrixXd centroids;  // K x D
  IndexVector labels;         // one per point
  Eigen::VectorXd cluster_weight;
  double sse = 0.0;
  /// SSE after every centroid update, in iteration order.
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;
};

/// Weighted Lloyd iterations over the rows of `points`. Rows must be pairwise
/// distinct; weights must be positive. Requires 1 <= k <= points.rows().
LloydResult lloyd(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                  const KMeansOptions& opts);

/// Nearest row of `centroids` to `point`; ties go to the lowest index.
template <typename PointExpr>
Index nearest_centroid(const Eigen::MatrixBase<PointExpr>& point, const Eigen::MatrixXd& centroids,
                       double* distance = nullptr) {
  Index best = 0;
  double best_d = (centroids.row(0) - point).squaredNorm();
  for (Index k = 1; k < centroids.rows(); ++k) {
    const double d = (centroids.row(k) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (distance != nullptr) *distance = best_d;
  return best;
}

/// Color lookup table. Row k of `centroids` is entry k; sizes[k] is its
/// member count.
struct Palette {
  Eigen::MatrixXd centroids;  // K x C
  Eigen::Matrix<Index, Eigen::Dynamic, 1> sizes;

  Index k() const noexcept { return centroids.rows(); }
  Index channels() const noexcept { return centroids.cols(); }
};

struct KMeansResult {
  Palette palette;
  IndexMap assignment;
  double sse = 0.0;
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;
};

/// Content-adaptive palette: K-means over the C-vectors of every cell.
/// Palette entries are returned sorted lexicographically by centroid.
KMeansResult kmeans_palette(const QuantizedTensor& q, const KMeansOptions& opts);

/// Number of pairwise distinct cell vectors.
Index count_distinct_cells(const QuantizedTensor& q);

/// SSE of `values` against the palette rendering of `assignment`.
double palette_sse(const FeatureTensor& values, const Palette& palette, const IndexMap& assignment);

struct DistortionPoint {
  Index k = 0;
  double sse = 0.0;
};

struct ElbowResult {
  Index k = 0;
  /// False when every point lies on the chord (no knee).
  bool knee_found = false;
};

/// Knee of a (K, SSE) curve: the point farthest from the chord joining the
/// first and last points after min-max normalizing both axes.
ElbowResult elbow_select_k(std::span<const DistortionPoint> curve);

}  // namespace pdc
