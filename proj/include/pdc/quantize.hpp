#pragma once

#include <cstdint>
#include <vector>

#include "pdc/tensor.hpp"

namespace pdc {

enum class QuantizerMode : std::uint8_t {
  FixedUnitRange = 0,
  PerChannelMinMax = 1,
};

struct ChannelAffine {
  double scale = 1.0;
  double offset = 0.0;

  friend bool operator==(const ChannelAffine&, const ChannelAffine&) = default;
};

/// float -> u8 mapping. In fixed mode the channel list is empty and every
/// channel uses scale 1, offset 0.
struct QuantizerConfig {
  QuantizerMode mode = QuantizerMode::FixedUnitRange;
  std::vector<ChannelAffine> channels;

  static QuantizerConfig fixed_unit_range() { return {}; }
  /// Per-channel offset = min, scale = max - min (1 for constant channels).
  static QuantizerConfig fit_minmax(const FeatureTensor& z);

  /// Throws Config when a minmax entry has a non-positive or non-finite scale.
  void validate() const;
  ChannelAffine channel(Index c) const;

  friend bool operator==(const QuantizerConfig&, const QuantizerConfig&) = default;
};

/// Round to nearest integer, ties to even, independent of the FP environment.
double round_half_even(double x) noexcept;

QuantizedTensor quantize(const FeatureTensor& z, const QuantizerConfig& cfg);
FeatureTensor dequantize(const QuantizedTensor& q, const QuantizerConfig& cfg);

/// Reinterpret u8 codes as real values in [0, 255] (the palette domain).
FeatureTensor to_values(const QuantizedTensor& q);
/// Half-even round and clamp real values in the palette domain back to u8.
QuantizedTensor round_to_u8(const FeatureTensor& values);

}  // namespace pdc
