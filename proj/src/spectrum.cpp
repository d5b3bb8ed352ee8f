#include "pdc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

namespace pdc {

double Spectrum::squared_norm() const {
  double s = 0.0;
  for (const auto& m : channels) s += m.squaredNorm();
  return s;
}

Spectrum dft2_magnitude(const FeatureTensor& x) {
  require(!x.empty(), ErrorCode::InvalidInput, "cannot transform an empty tensor");
  require(all_finite(x), ErrorCode::InvalidInput, "tensor contains non-finite values");
  const Index h = x.height();
  const Index w = x.width();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in;
  std::vector<std::complex<double>> out;
  // The kissfft backend faults on length-1 input; that DFT is the identity.
  auto transform = [&fft](const std::vector<std::complex<double>>& src, std::vector<std::complex<double>>& dst) {
    if (src.size() == 1) {
      dst = src;
    } else {
      fft.fwd(dst, src);
    }
  };

  Spectrum s;
  s.channels.reserve(static_cast<std::size_t>(x.channels()));
  for (Index c = 0; c < x.channels(); ++c) {
    Eigen::MatrixXcd grid(h, w);
    in.resize(static_cast<std::size_t>(w));
    for (Index p = 0; p < h; ++p) {
      for (Index q = 0; q < w; ++q) in[static_cast<std::size_t>(q)] = x(p, q, c);
      transform(in, out);
      for (Index l = 0; l < w; ++l) grid(p, l) = out[static_cast<std::size_t>(l)];
    }
    in.resize(static_cast<std::size_t>(h));
    for (Index l = 0; l < w; ++l) {
      for (Index p = 0; p < h; ++p) in[static_cast<std::size_t>(p)] = grid(p, l);
      transform(in, out);
      for (Index k = 0; k < h; ++k) grid(k, l) = out[static_cast<std::size_t>(k)];
    }
    s.channels.push_back(grid.cwiseAbs());
  }
  return s;
}

double perceptual_similarity(std::span<const Spectrum> a, std::span<const Spectrum> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::DimensionMismatch, "layer counts differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].channels.size() == b[i].channels.size(), ErrorCode::DimensionMismatch,
            "channel counts differ in layer " + std::to_string(i));
    for (std::size_t c = 0; c < a[i].channels.size(); ++c) {
      const auto& ma = a[i].channels[c];
      const auto& mb = b[i].channels[c];
      require(ma.rows() == mb.rows() && ma.cols() == mb.cols(), ErrorCode::DimensionMismatch,
              "spectrum shapes differ in layer " + std::to_string(i));
      dot += ma.cwiseProduct(mb).sum();
      na += ma.squaredNorm();
      nb += mb.squaredNorm();
    }
  }
  require(na > 0.0 && nb > 0.0, ErrorCode::Degenerate, "zero-norm spectrum");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double perceptual_distance(std::span<const Spectrum> a, std::span<const Spectrum> b) {
  return std::clamp(1.0 - perceptual_similarity(a, b), 0.0, 1.0);
}

double perceptual_distance(const FeatureTensor& a, const FeatureTensor& b) {
  const Spectrum sa = dft2_magnitude(a);
  const Spectrum sb = dft2_magnitude(b);
  return perceptual_distance(std::span(&sa, 1), std::span(&sb, 1));
}

FeatureTensor circular_shift(const FeatureTensor& x, Index dy, Index dx) {
  FeatureTensor out(x.width(), x.height(), x.channels());
  const Index h = x.height();
  const Index w = x.width();
  for (Index y = 0; y < h; ++y) {
    const Index ty = ((y + dy) % h + h) % h;
    for (Index xx = 0; xx < w; ++xx) {
      const Index tx = ((xx + dx) % w + w) % w;
      out.matrix().row(ty * w + tx) = x.matrix().row(y * w + xx);
    }
  }
  return out;
}

}  // namespace pdc
