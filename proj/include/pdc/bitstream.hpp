#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdc/diffusion.hpp"
#include "pdc/huffman.hpp"
#include "pdc/kmeans.hpp"
#include "pdc/merge_chain.hpp"
#include "pdc/quantize.hpp"
#include "pdc/tensor.hpp"

namespace pdc {

// .pdc layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "PDC1"
//   4       1     version (1)
//   5       4     width u32
//   9       4     height u32
//   13      1     channels u8
//   14      2     K0 u16
//   16      2     severity t u16
//   18      1     quantizer mode (0 fixed-unit-range, 1 per-channel min-max)
//   19      16*C  min-max only: per channel scale f64, offset f64
//   ..      4     palette byte count u32 (= K_t * C)
//   ..      4     code table byte count u32 (= K_t)
//   ..      4     index payload byte count u32
//   ..            palette: K_t rows of C u8 centroids
//   ..            code table: one code length u8 per palette entry
//   ..            index payload: canonical Huffman codes, MSB-first, zero padded
//
// with K_t = K0 - t. The payload holds exactly width*height codes.

inline constexpr std::array<std::uint8_t, 4> kContainerMagic{'P', 'D', 'C', '1'};
inline constexpr std::uint8_t kContainerVersion = 1;

struct BitstreamHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t channels = 0;
  std::uint16_t k0 = 0;
  std::uint16_t severity = 0;
  QuantizerConfig quantizer;
  std::uint32_t palette_bytes = 0;
  std::uint32_t table_bytes = 0;
  std::uint32_t index_bytes = 0;

  Index k_t() const noexcept { return static_cast<Index>(k0) - static_cast<Index>(severity); }
  std::size_t encoded_size() const noexcept;
};

using PaletteBytes = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Everything a container holds, in decoded form.
struct ContainerPayload {
  BitstreamHeader header;
  PaletteBytes palette;  // K_t x C
  HuffmanTable table;
  IndexMap indices;
};

struct EncodedImage {
  BitstreamHeader header;
  std::vector<std::uint8_t> bytes;
  std::uint64_t index_bits = 0;  // before padding
};

/// Severity-t palette rounded to u8.
PaletteBytes round_palette(const Palette& palette);

/// Container for the chain's severity-t state. The code table comes from the
/// severity-t index histogram.
EncodedImage encode_container(const PaletteChain& chain, Severity t, const QuantizerConfig& quantizer);

/// Byte-exact serialization; the header's length fields are recomputed.
EncodedImage serialize_container(const ContainerPayload& payload);

/// Parses and validates a container. Throws Format (with byte offset),
/// Truncation or Corruption.
ContainerPayload parse_container(std::span<const std::uint8_t> bytes);

struct DecodedImage {
  ContainerPayload payload;
  Severity severity;
  /// Received palette as real values with member counts from the index map.
  Palette palette;
  /// Rendering in the palette domain [0, 255].
  FeatureTensor values;

  const IndexMap& indices() const noexcept { return payload.indices; }
};

DecodedImage decode_container(std::span<const std::uint8_t> bytes);

/// Binds a decoded image to the chain it was encoded from. Throws
/// Consistency unless the chain's severity-t state reproduces the received
/// indices and rounded palette exactly.
DegradedState attach_chain(const DecodedImage& decoded, std::shared_ptr<const PaletteChain> chain);

// ---------------------------------------------------------------------------
// Encoder pipeline: quantize, build the base palette, build the merge chain.

struct EncoderOptions {
  Index k0 = 64;
  std::uint64_t seed = 0;
  QuantizerMode quantizer = QuantizerMode::FixedUnitRange;
  bool single_pass_kmeans = false;
  InitMode init = InitMode::KMeansPlusPlus;
  int max_iters = 100;
  int threads = 1;
};

struct ChainBuild {
  QuantizerConfig quantizer;
  QuantizedTensor quantized;
  std::shared_ptr<const PaletteChain> chain;
  double base_sse = 0.0;
};

/// From a real-valued tensor; the quantizer is fitted per `opts.quantizer`.
ChainBuild build_chain(const FeatureTensor& z, const EncoderOptions& opts);
/// From an 8-bit image, which is used as-is under the fixed quantizer.
ChainBuild build_chain(const QuantizedTensor& q, const EncoderOptions& opts,
                       QuantizerConfig quantizer = QuantizerConfig::fixed_unit_range());

}  // namespace pdc
