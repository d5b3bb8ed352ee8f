#pragma once

#include <cstdint>

#include "pdc/tensor.hpp"

namespace pdc {

/// Reported when the inputs are identical (MSE = 0).
inline constexpr double kPsnrIdenticalDb = 100.0;

struct PsnrResult {
  double db = 0.0;
  double mse = 0.0;
  bool identical = false;
};

/// 10 log10(255^2 / MSE) over all samples.
PsnrResult compute_psnr(const QuantizedTensor& a, const QuantizedTensor& b);

inline constexpr Index kSsimWindow = 8;
inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

/// Single-scale SSIM with a uniform 8x8 window at stride 1 and population
/// statistics; averaged over windows, then over channels.
double compute_ssim(const QuantizedTensor& a, const QuantizedTensor& b);

/// Bits per pixel of the source image: 8 * bytes / (width * height).
double compute_bpp(std::uint64_t bytes, Index width, Index height);

double sum_squared_error(const FeatureTensor& a, const FeatureTensor& b);

}  // namespace pdc
