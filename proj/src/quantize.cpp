#include "pdc/quantize.hpp"

#include <algorithm>
#include <cmath>

namespace pdc {

double round_half_even(double x) noexcept {
  const double lower = std::floor(x);
  const double diff = x - lower;
  if (diff < 0.5) return lower;
  if (diff > 0.5) return lower + 1.0;
  return std::fmod(lower, 2.0) == 0.0 ? lower : lower + 1.0;
}

QuantizerConfig QuantizerConfig::fit_minmax(const FeatureTensor& z) {
  require(!z.empty(), ErrorCode::InvalidInput, "cannot fit a quantizer to an empty tensor");
  require(all_finite(z), ErrorCode::InvalidInput, "tensor contains non-finite values");
  QuantizerConfig cfg;
  cfg.mode = QuantizerMode::PerChannelMinMax;
  cfg.channels.reserve(static_cast<std::size_t>(z.channels()));
  for (Index c = 0; c < z.channels(); ++c) {
    const double lo = z.matrix().col(c).minCoeff();
    const double hi = z.matrix().col(c).maxCoeff();
    cfg.channels.push_back({hi > lo ? hi - lo : 1.0, lo});
  }
  return cfg;
}

void QuantizerConfig::validate() const {
  if (mode == QuantizerMode::FixedUnitRange) {
    require(channels.empty(), ErrorCode::Config, "fixed-unit-range quantizer takes no parameters");
    return;
  }
  require(mode == QuantizerMode::PerChannelMinMax, ErrorCode::Config, "unknown quantizer mode");
  for (const auto& ch : channels) {
    require(std::isfinite(ch.scale) && std::isfinite(ch.offset) && ch.scale > 0.0,
            ErrorCode::Config, "quantizer scale must be finite and > 0");
  }
}

ChannelAffine QuantizerConfig::channel(Index c) const {
  if (mode == QuantizerMode::FixedUnitRange) return {};
  return channels.at(static_cast<std::size_t>(c));
}

namespace {

void check_channels(const QuantizerConfig& cfg, Index channels) {
  cfg.validate();
  if (cfg.mode == QuantizerMode::PerChannelMinMax) {
    require(static_cast<Index>(cfg.channels.size()) == channels, ErrorCode::Config,
            "quantizer has " + std::to_string(cfg.channels.size()) + " channels, tensor has " +
                std::to_string(channels));
  }
}

}  // namespace

QuantizedTensor quantize(const FeatureTensor& z, const QuantizerConfig& cfg) {
  require(!z.empty(), ErrorCode::InvalidInput, "cannot quantize an empty tensor");
  require(all_finite(z), ErrorCode::InvalidInput, "tensor contains non-finite values");
  check_channels(cfg, z.channels());
  const bool fixed = cfg.mode == QuantizerMode::FixedUnitRange;

  QuantizedTensor q(z.width(), z.height(), z.channels());
  for (Index c = 0; c < z.channels(); ++c) {
    const ChannelAffine a = cfg.channel(c);
    for (Index i = 0; i < z.cells(); ++i) {
      const double v = z.matrix()(i, c);
      if (fixed) require(v >= 0.0 && v <= 1.0, ErrorCode::Range, "value outside [0, 1]");
      const double level = std::clamp(round_half_even((v - a.offset) / a.scale * 255.0), 0.0, 255.0);
      q.matrix()(i, c) = static_cast<std::uint8_t>(level);
    }
  }
  return q;
}

FeatureTensor dequantize(const QuantizedTensor& q, const QuantizerConfig& cfg) {
  check_channels(cfg, q.channels());
  FeatureTensor z(q.width(), q.height(), q.channels());
  for (Index c = 0; c < q.channels(); ++c) {
    const ChannelAffine a = cfg.channel(c);
    for (Index i = 0; i < q.cells(); ++i) {
      z.matrix()(i, c) = static_cast<double>(q.matrix()(i, c)) / 255.0 * a.scale + a.offset;
    }
  }
  return z;
}

FeatureTensor to_values(const QuantizedTensor& q) { return q.cast<double>(); }

QuantizedTensor round_to_u8(const FeatureTensor& values) {
  QuantizedTensor q(values.width(), values.height(), values.channels());
  q.matrix() = values.matrix().unaryExpr([](double v) {
    return static_cast<std::uint8_t>(std::clamp(round_half_even(v), 0.0, 255.0));
  });
  return q;
}

}  // namespace pdc
