#include "pdc/pseudo_labels.hpp"

#include <algorithm>
#include <numeric>

#include "pdc/spectrum.hpp"

namespace pdc {

PatchGrid extract_patches(const FeatureTensor& x, Index n) {
  require(n >= 1, ErrorCode::Config, "patch side must be >= 1");
  PatchGrid g;
  g.rows = x.height() / n;
  g.columns = x.width() / n;
  if (g.rows == 0 || g.columns == 0) {
    g.rows = g.columns = 0;
    g.empty_warning = true;
    return g;
  }
  g.patches.reserve(static_cast<std::size_t>(g.rows * g.columns));
  for (Index r = 0; r < g.rows; ++r) {
    for (Index c = 0; c < g.columns; ++c) {
      FeatureTensor p(n, n, x.channels());
      for (Index y = 0; y < n; ++y) {
        for (Index xx = 0; xx < n; ++xx) {
          p.matrix().row(y * n + xx) = x.matrix().row((r * n + y) * x.width() + c * n + xx);
        }
      }
      g.patches.push_back(std::move(p));
    }
  }
  return g;
}

Eigen::MatrixXd spectral_descriptors(std::span<const FeatureTensor> patches) {
  require(!patches.empty(), ErrorCode::InvalidInput, "no patches");
  const FeatureTensor& first = patches.front();
  const Index len = first.size();
  Eigen::MatrixXd d(static_cast<Index>(patches.size()), len);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    require(patches[i].same_shape(first), ErrorCode::DimensionMismatch, "patches differ in shape");
    const Spectrum s = dft2_magnitude(patches[i]);
    Index col = 0;
    for (const auto& m : s.channels) {
      for (Index k = 0; k < m.rows(); ++k) {
        for (Index l = 0; l < m.cols(); ++l) d(static_cast<Index>(i), col++) = m(k, l);
      }
    }
    const double norm = d.row(static_cast<Index>(i)).norm();
    if (norm > 0.0) d.row(static_cast<Index>(i)) /= norm;
  }
  return d;
}

IndexVector canonical_labels(const IndexVector& labels) {
  std::vector<std::int64_t> remap;
  IndexVector out(labels.size());
  for (Index i = 0; i < labels.size(); ++i) {
    const std::uint32_t l = labels(i);
    if (l >= remap.size()) remap.resize(l + 1, -1);
    if (remap[l] < 0) remap[l] = std::count_if(remap.begin(), remap.end(), [](auto v) { return v >= 0; });
    out(i) = static_cast<std::uint32_t>(remap[l]);
  }
  return out;
}

namespace {

struct DistinctRows {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  std::vector<Index> row_point;
};

DistinctRows distinct_rows(const Eigen::MatrixXd& d) {
  std::vector<Index> order(static_cast<std::size_t>(d.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto lex_less = [&](Index a, Index b) {
    for (Index c = 0; c < d.cols(); ++c) {
      if (d(a, c) != d(b, c)) return d(a, c) < d(b, c);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), lex_less);
  DistinctRows g;
  g.row_point.assign(order.size(), 0);
  std::vector<Index> reps;
  std::vector<double> w;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || lex_less(order[i - 1], order[i])) {
      reps.push_back(order[i]);
      w.push_back(0.0);
    }
    w.back() += 1.0;
    g.row_point[static_cast<std::size_t>(order[i])] = static_cast<Index>(reps.size()) - 1;
  }
  g.points.resize(static_cast<Index>(reps.size()), d.cols());
  g.weights.resize(static_cast<Index>(reps.size()));
  for (std::size_t i = 0; i < reps.size(); ++i) {
    g.points.row(static_cast<Index>(i)) = d.row(reps[i]);
    g.weights(static_cast<Index>(i)) = w[i];
  }
  return g;
}

}  // namespace

PseudoLabelSet generate_pseudo_labels(std::span<const FeatureTensor> patches, Index k, std::uint64_t seed,
                                      int max_iters) {
  require(k >= 1, ErrorCode::Config, "k must be >= 1");
  require(k <= static_cast<Index>(patches.size()), ErrorCode::Infeasible,
          "k = " + std::to_string(k) + " exceeds the patch count " + std::to_string(patches.size()));
  const Eigen::MatrixXd desc = spectral_descriptors(patches);
  const DistinctRows g = distinct_rows(desc);
  KMeansOptions opts;
  opts.k = k;
  opts.seed = seed;
  opts.max_iters = max_iters;
  const LloydResult r = lloyd(g.points, g.weights, opts);

  IndexVector raw(desc.rows());
  for (Index i = 0; i < desc.rows(); ++i) raw(i) = r.labels(g.row_point[static_cast<std::size_t>(i)]);

  PseudoLabelSet out;
  out.k = k;
  out.labels = canonical_labels(raw);
  out.centroids.resize(k, desc.cols());
  for (Index i = 0; i < desc.rows(); ++i) out.centroids.row(out.labels(i)) = r.centroids.row(raw(i));
  out.medoids.assign(static_cast<std::size_t>(k), -1);
  std::vector<double> best(static_cast<std::size_t>(k), 0.0);
  for (Index i = 0; i < desc.rows(); ++i) {
    const auto l = static_cast<std::size_t>(out.labels(i));
    const double dist = (desc.row(i) - out.centroids.row(static_cast<Index>(l))).squaredNorm();
    if (out.medoids[l] < 0 || dist < best[l]) {
      out.medoids[l] = i;
      best[l] = dist;
    }
  }
  out.sse = r.sse;
  return out;
}

std::vector<DistortionPoint> label_distortion_curve(std::span<const FeatureTensor> patches, Index k_max,
                                                    std::uint64_t seed, int restarts) {
  const DistinctRows g = distinct_rows(spectral_descriptors(patches));
  const Index limit = std::min(k_max, g.points.rows());
  std::vector<DistortionPoint> curve;
  for (Index k = 1; k <= limit; ++k) {
    KMeansOptions opts;
    opts.k = k;
    opts.seed = seed;
    opts.restarts = restarts;
    double sse = lloyd(g.points, g.weights, opts).sse;
    // Keep the curve monotone when a local optimum at larger K is worse.
    if (!curve.empty()) sse = std::min(sse, curve.back().sse);
    curve.push_back({k, sse});
  }
  return curve;
}

}  // namespace pdc
