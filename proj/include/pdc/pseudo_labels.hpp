#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdc/kmeans.hpp"
#include "pdc/tensor.hpp"

namespace pdc {

struct PatchGrid {
  std::vector<FeatureTensor> patches;  // row-major tile order
  Index rows = 0;
  Index columns = 0;
  /// Set when no full tile fits.
  bool empty_warning = false;
};

/// Non-overlapping n x n tiles; right and bottom remainders are dropped.
PatchGrid extract_patches(const FeatureTensor& x, Index n);

/// One row per patch: the flattened magnitude spectrum scaled to unit L2
/// norm. For unit rows, |u - v|^2 / 2 equals the spectral distance of the
/// two patches. An all-zero spectrum stays a zero row.
Eigen::MatrixXd spectral_descriptors(std::span<const FeatureTensor> patches);

struct PseudoLabelSet {
  Index k = 0;
  /// Cluster id per patch, numbered by first appearance.
  IndexVector labels;
  Eigen::MatrixXd centroids;  // k x descriptor length
  std::vector<Index> medoids; // patch closest to each centroid
  double sse = 0.0;

  Index patch_count() const noexcept { return labels.size(); }
};

PseudoLabelSet generate_pseudo_labels(std::span<const FeatureTensor> patches, Index k, std::uint64_t seed,
                                      int max_iters = 100);

/// Renumber labels so that ids appear in increasing order of first use.
IndexVector canonical_labels(const IndexVector& labels);

/// SSE of descriptor clustering for K = 1..k_max (capped at the number of
/// distinct descriptors), for elbow selection.
std::vector<DistortionPoint> label_distortion_curve(std::span<const FeatureTensor> patches, Index k_max,
                                                    std::uint64_t seed, int restarts = 4);

}  // namespace pdc
