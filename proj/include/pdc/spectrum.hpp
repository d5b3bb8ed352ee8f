#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdc/tensor.hpp"

namespace pdc {

/// Per-channel 2-D DFT magnitudes. Each matrix is height x width, indexed
/// (k, l) with k the vertical and l the horizontal frequency.
struct Spectrum {
  std::vector<Eigen::MatrixXd> channels;

  double squared_norm() const;
};

/// |F(k, l)| with F(k, l) = sum_{p,q} x(p, q) exp(-i 2 pi (k p / H + l q / W)).
Spectrum dft2_magnitude(const FeatureTensor& x);

/// Normalized correlation of stacked magnitude spectra (one Spectrum per
/// layer): sum_i <A_i, B_i> / (sqrt(sum_i |A_i|^2) sqrt(sum_i |B_i|^2)).
double perceptual_similarity(std::span<const Spectrum> a, std::span<const Spectrum> b);

/// 1 - perceptual_similarity, clamped to [0, 1].
double perceptual_distance(std::span<const Spectrum> a, std::span<const Spectrum> b);

/// Single-layer convenience: the tensors' channels form one layer.
double perceptual_distance(const FeatureTensor& a, const FeatureTensor& b);

/// Circular shift by (dy, dx) cells; negative offsets allowed.
FeatureTensor circular_shift(const FeatureTensor& x, Index dy, Index dx);

}  // namespace pdc
