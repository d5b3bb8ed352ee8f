#include "pdc/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>

#include "pdc/parallel.hpp"

namespace pdc {
namespace {

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Index sample_weighted(const Eigen::VectorXd& w, std::mt19937_64& rng) {
  const double total = w.sum();
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) <= 0.0) continue;
    acc += w(i);
    last_positive = i;
    if (acc > target) return i;
  }
  return last_positive;
}

Eigen::MatrixXd init_plus_plus(const Eigen::MatrixXd& pts, const Eigen::VectorXd& weights, Index k,
                               std::mt19937_64& rng) {
  const Index n = pts.rows();
  Eigen::MatrixXd c(k, pts.cols());
  c.row(0) = pts.row(sample_weighted(weights, rng));
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (pts.row(i) - c.row(0)).squaredNorm();
  for (Index j = 1; j < k; ++j) {
    const Index pick = sample_weighted(d2.cwiseProduct(weights), rng);
    c.row(j) = pts.row(pick);
    for (Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (pts.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

Eigen::MatrixXd init_random(const Eigen::MatrixXd& pts, Index k, std::mt19937_64& rng) {
  const Index n = pts.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Eigen::MatrixXd c(k, pts.cols());
  for (Index j = 0; j < k; ++j) {
    const Index span = n - j;
    const Index r = j + std::min<Index>(span - 1, static_cast<Index>(uniform01(rng) * span));
    std::swap(order[j], order[r]);
    c.row(j) = pts.row(order[j]);
  }
  return c;
}

struct Assignment {
  IndexVector labels;
  Eigen::VectorXd dist;
};

Assignment assign(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& c, int threads) {
  Assignment a{IndexVector(pts.rows()), Eigen::VectorXd(pts.rows())};
  parallel_for(pts.rows(), threads, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      double d = 0.0;
      a.labels(i) = static_cast<std::uint32_t>(nearest_centroid(pts.row(i), c, &d));
      a.dist(i) = d;
    }
  });
  return a;
}

// Weighted means of the labelled groups. Returns the weight per cluster;
// empty clusters keep their previous centroid and report weight 0.
Eigen::VectorXd update_means(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w,
                             const IndexVector& labels, Eigen::MatrixXd& c) {
  const Index k = c.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, pts.cols());
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
  for (Index i = 0; i < pts.rows(); ++i) {
    sum.row(labels(i)) += w(i) * pts.row(i);
    mass(labels(i)) += w(i);
  }
  for (Index j = 0; j < k; ++j) {
    if (mass(j) > 0.0) c.row(j) = sum.row(j) / mass(j);
  }
  return mass;
}

// Moves the point farthest from its nearest live centroid into each empty
// cluster, then refreshes the means.
void reseed_empty(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, IndexVector& labels,
                  Eigen::MatrixXd& c, Eigen::VectorXd& mass) {
  for (Index e = 0; e < c.rows(); ++e) {
    if (mass(e) > 0.0) continue;
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < pts.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < c.rows(); ++j) {
        if (mass(j) > 0.0) best = std::min(best, (pts.row(i) - c.row(j)).squaredNorm());
      }
      if (best > far_d) {
        far_d = best;
        far = i;
      }
    }
    labels(far) = static_cast<std::uint32_t>(e);
    c.row(e) = pts.row(far);
    mass = update_means(pts, w, labels, c);
  }
}

double weighted_sse(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, const IndexVector& labels,
                    const Eigen::MatrixXd& c) {
  double s = 0.0;
  for (Index i = 0; i < pts.rows(); ++i) s += w(i) * (pts.row(i) - c.row(labels(i))).squaredNorm();
  return s;
}

LloydResult run_from(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, Eigen::MatrixXd c,
                     const KMeansOptions& opts) {
  LloydResult r;
  IndexVector prev;
  const int max_iters = opts.single_pass ? 1 : std::max(opts.max_iters, 1);
  for (int it = 0; it < max_iters; ++it) {
    Assignment a = assign(pts, c, opts.threads);
    if (it > 0 && a.labels == prev) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd mass = update_means(pts, w, a.labels, c);
    reseed_empty(pts, w, a.labels, c, mass);
    r.cluster_weight = mass;
    prev = std::move(a.labels);
    r.iterations = it + 1;
    r.sse_history.push_back(weighted_sse(pts, w, prev, c));
  }
  r.labels = std::move(prev);
  r.centroids = std::move(c);
  r.sse = r.sse_history.back();
  return r;
}

bool next_combination(std::vector<Index>& comb, Index n) {
  const Index k = static_cast<Index>(comb.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (Index j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double binomial(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

constexpr double kMaxExhaustiveSeeds = 2.0e5;

}  // namespace

LloydResult lloyd(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights,
                  const KMeansOptions& opts) {
  const Index n = points.rows();
  require(n >= 1, ErrorCode::InvalidInput, "k-means needs at least one point");
  require(weights.size() == n, ErrorCode::DimensionMismatch, "one weight per point required");
  require(opts.k >= 1, ErrorCode::Config, "k must be >= 1");
  require(opts.max_iters >= 1, ErrorCode::Config, "max_iters must be >= 1");
  require(opts.restarts >= 1, ErrorCode::Config, "restarts must be >= 1");
  require(opts.threads >= 1, ErrorCode::Config, "threads must be >= 1");
  require(opts.k <= n, ErrorCode::Infeasible,
          "k = " + std::to_string(opts.k) + " exceeds the " + std::to_string(n) +
              " distinct values available");

  if (opts.init == InitMode::Exhaustive) {
    require(binomial(n, opts.k) <= kMaxExhaustiveSeeds, ErrorCode::Config,
            "exhaustive initialization would need too many seeds");
    std::vector<Index> comb(static_cast<std::size_t>(opts.k));
    std::iota(comb.begin(), comb.end(), Index{0});
    LloydResult best;
    bool have = false;
    do {
      Eigen::MatrixXd seeds(opts.k, points.cols());
      for (Index j = 0; j < opts.k; ++j) seeds.row(j) = points.row(comb[j]);
      LloydResult r = run_from(points, weights, std::move(seeds), opts);
      if (!have || r.sse < best.sse) {
        best = std::move(r);
        have = true;
      }
    } while (next_combination(comb, n));
    return best;
  }

  std::mt19937_64 rng(opts.seed);
  LloydResult best;
  for (int attempt = 0; attempt < std::max(opts.restarts, 1); ++attempt) {
    Eigen::MatrixXd seeds = opts.init == InitMode::Random ? init_random(points, opts.k, rng)
                                                           : init_plus_plus(points, weights, opts.k, rng);
    LloydResult r = run_from(points, weights, std::move(seeds), opts);
    if (attempt == 0 || r.sse < best.sse) best = std::move(r);
  }
  return best;
}

namespace {

struct DistinctCells {
  Eigen::MatrixXd points;         // distinct C-vectors, lexicographic order
  Eigen::VectorXd weights;        // occurrence counts
  std::vector<Index> cell_point;  // cell -> distinct point id
};

DistinctCells group_cells(const QuantizedTensor& q) {
  const Index cells = q.cells();
  const Index ch = q.channels();
  const std::uint8_t* base = q.data();
  auto row_less = [&](Index a, Index b) {
    const int cmp = std::memcmp(base + a * ch, base + b * ch, static_cast<std::size_t>(ch));
    return cmp < 0 || (cmp == 0 && a < b);
  };
  std::vector<Index> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), row_less);

  DistinctCells g;
  g.cell_point.assign(static_cast<std::size_t>(cells), 0);
  std::vector<Index> firsts;
  std::vector<double> counts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Index cell = order[i];
    if (i == 0 || std::memcmp(base + order[i - 1] * ch, base + cell * ch,
                              static_cast<std::size_t>(ch)) != 0) {
      firsts.push_back(cell);
      counts.push_back(0.0);
    }
    counts.back() += 1.0;
    g.cell_point[static_cast<std::size_t>(cell)] = static_cast<Index>(firsts.size()) - 1;
  }
  const Index n = static_cast<Index>(firsts.size());
  g.points.resize(n, ch);
  g.weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    g.points.row(i) = q.matrix().row(firsts[static_cast<std::size_t>(i)]).cast<double>();
    g.weights(i) = counts[static_cast<std::size_t>(i)];
  }
  return g;
}

}  // namespace

Index count_distinct_cells(const QuantizedTensor& q) {
  if (q.empty()) return 0;
  return group_cells(q).points.rows();
}

KMeansResult kmeans_palette(const QuantizedTensor& q, const KMeansOptions& opts) {
  require(!q.empty(), ErrorCode::InvalidInput, "cannot build a palette for an empty tensor");
  const DistinctCells g = group_cells(q);
  LloydResult r = lloyd(g.points, g.weights, opts);

  // Canonical entry order: lexicographic by centroid, ties by original id.
  const Index k = r.centroids.rows();
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index c = 0; c < r.centroids.cols(); ++c) {
      if (r.centroids(a, c) != r.centroids(b, c)) return r.centroids(a, c) < r.centroids(b, c);
    }
    return a < b;
  });
  std::vector<std::uint32_t> rank(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<std::uint32_t>(i);

  KMeansResult out;
  out.palette.centroids.resize(k, r.centroids.cols());
  out.palette.sizes = Eigen::Matrix<Index, Eigen::Dynamic, 1>::Zero(k);
  for (Index i = 0; i < k; ++i) out.palette.centroids.row(i) = r.centroids.row(order[i]);

  out.assignment.width = q.width();
  out.assignment.height = q.height();
  out.assignment.indices.resize(q.cells());
  for (Index cell = 0; cell < q.cells(); ++cell) {
    const std::uint32_t label = rank[r.labels(g.cell_point[static_cast<std::size_t>(cell)])];
    out.assignment.indices(cell) = label;
    ++out.palette.sizes(label);
  }
  out.sse = r.sse;
  out.sse_history = std::move(r.sse_history);
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

double palette_sse(const FeatureTensor& values, const Palette& palette, const IndexMap& assignment) {
  require(values.cells() == assignment.cells() && values.channels() == palette.channels(),
          ErrorCode::DimensionMismatch, "palette, assignment and tensor disagree in shape");
  double s = 0.0;
  for (Index i = 0; i < values.cells(); ++i) {
    s += (values.matrix().row(i) - palette.centroids.row(assignment.indices(i))).squaredNorm();
  }
  return s;
}

ElbowResult elbow_select_k(std::span<const DistortionPoint> curve) {
  require(curve.size() >= 3, ErrorCode::InsufficientData, "elbow selection needs >= 3 points");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    require(curve[i].k > curve[i - 1].k, ErrorCode::InvalidInput, "K values must be ascending");
    require(curve[i].sse <= curve[i - 1].sse, ErrorCode::InvalidInput,
            "SSE must be non-increasing in K");
  }
  for (const auto& p : curve) require(std::isfinite(p.sse), ErrorCode::InvalidInput, "SSE must be finite");

  const double k0 = static_cast<double>(curve.front().k);
  const double k_span = static_cast<double>(curve.back().k) - k0;
  const double s_max = curve.front().sse;
  const double s_span = s_max - curve.back().sse;
  if (s_span <= 0.0) return {curve.front().k, false};

  // Normalized chord runs from (0, 1) to (1, 0): x + y = 1.
  ElbowResult best{curve.front().k, false};
  double best_d = 0.0;
  for (const auto& p : curve) {
    const double x = (static_cast<double>(p.k) - k0) / k_span;
    const double y = (p.sse - curve.back().sse) / s_span;
    const double d = std::abs(x + y - 1.0) / std::sqrt(2.0);
    if (d > best_d) {
      best_d = d;
      best.k = p.k;
    }
  }
  constexpr double kFlat = 1e-12;
  if (best_d <= kFlat) return {curve.front().k, false};
  best.knee_found = true;
  return best;
}

}  // namespace pdc
