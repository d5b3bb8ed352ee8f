#include "pdc/metrics.hpp"

#include <cmath>

namespace pdc {

namespace {

template <typename A, typename B>
void check_same(const Tensor<A>& a, const Tensor<B>& b) {
  require(a.same_shape(b) && !a.empty(), ErrorCode::DimensionMismatch, "metric inputs differ in shape");
}

}  // namespace

PsnrResult compute_psnr(const QuantizedTensor& a, const QuantizedTensor& b) {
  check_same(a, b);
  const double sse = (a.matrix().cast<double>() - b.matrix().cast<double>()).squaredNorm();
  PsnrResult r;
  r.mse = sse / static_cast<double>(a.size());
  if (r.mse == 0.0) {
    r.identical = true;
    r.db = kPsnrIdenticalDb;
  } else {
    r.db = 10.0 * std::log10(255.0 * 255.0 / r.mse);
  }
  return r;
}

double compute_ssim(const QuantizedTensor& a, const QuantizedTensor& b) {
  check_same(a, b);
  require(a.width() >= kSsimWindow && a.height() >= kSsimWindow, ErrorCode::InsufficientSize,
          "SSIM needs images of at least 8x8");
  const Index wx = a.width() - kSsimWindow + 1;
  const Index wy = a.height() - kSsimWindow + 1;
  const double n = static_cast<double>(kSsimWindow * kSsimWindow);
  double channel_sum = 0.0;
  for (Index c = 0; c < a.channels(); ++c) {
    double window_sum = 0.0;
    for (Index y0 = 0; y0 < wy; ++y0) {
      for (Index x0 = 0; x0 < wx; ++x0) {
        double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
        for (Index y = y0; y < y0 + kSsimWindow; ++y) {
          for (Index x = x0; x < x0 + kSsimWindow; ++x) {
            const double va = a(y, x, c);
            const double vb = b(y, x, c);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
          }
        }
        const double ma = sa / n;
        const double mb = sb / n;
        const double var_a = saa / n - ma * ma;
        const double var_b = sbb / n - mb * mb;
        const double cov = sab / n - ma * mb;
        window_sum += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
                      ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
      }
    }
    channel_sum += window_sum / static_cast<double>(wx * wy);
  }
  return channel_sum / static_cast<double>(a.channels());
}

double compute_bpp(std::uint64_t bytes, Index width, Index height) {
  require(width >= 1 && height >= 1, ErrorCode::InvalidInput, "source dimensions must be >= 1");
  return 8.0 * static_cast<double>(bytes) / (static_cast<double>(width) * static_cast<double>(height));
}

double sum_squared_error(const FeatureTensor& a, const FeatureTensor& b) {
  check_same(a, b);
  return (a.matrix() - b.matrix()).squaredNorm();
}

}  // namespace pdc
