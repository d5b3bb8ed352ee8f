#include "pdc/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "pdc/byte_io.hpp"

namespace pdc {

std::size_t BitstreamHeader::encoded_size() const noexcept {
  std::size_t n = 4 + 1 + 4 + 4 + 1 + 2 + 2 + 1 + 12;
  if (quantizer.mode == QuantizerMode::PerChannelMinMax) n += 16 * quantizer.channels.size();
  return n;
}

PaletteBytes round_palette(const Palette& palette) {
  return palette.centroids
      .unaryExpr([](double v) { return static_cast<std::uint8_t>(std::clamp(round_half_even(v), 0.0, 255.0)); });
}

EncodedImage encode_container(const PaletteChain& chain, Severity t, const QuantizerConfig& quantizer) {
  require(chain.width() <= std::numeric_limits<std::uint32_t>::max() &&
              chain.height() <= std::numeric_limits<std::uint32_t>::max(),
          ErrorCode::Config, "image too large for the container");
  require(chain.channels() <= 255, ErrorCode::Config, "container supports at most 255 channels");
  require(chain.base_k() <= 65535, ErrorCode::Config, "container supports K0 <= 65535");
  const Palette& palette = chain.palette(t.value());

  ContainerPayload p;
  p.header.width = static_cast<std::uint32_t>(chain.width());
  p.header.height = static_cast<std::uint32_t>(chain.height());
  p.header.channels = static_cast<std::uint8_t>(chain.channels());
  p.header.k0 = static_cast<std::uint16_t>(chain.base_k());
  p.header.severity = static_cast<std::uint16_t>(t.value());
  p.header.quantizer = quantizer;
  p.palette = round_palette(palette);
  p.indices = chain.assignment(t.value());
  std::vector<std::uint64_t> freqs(static_cast<std::size_t>(palette.k()));
  for (Index k = 0; k < palette.k(); ++k) freqs[static_cast<std::size_t>(k)] = static_cast<std::uint64_t>(palette.sizes(k));
  p.table = huffman_build(freqs);
  return serialize_container(p);
}

EncodedImage serialize_container(const ContainerPayload& payload) {
  const BitstreamHeader& in = payload.header;
  in.quantizer.validate();
  require(in.quantizer.mode == QuantizerMode::FixedUnitRange || in.quantizer.channels.size() == in.channels,
          ErrorCode::Config, "quantizer channel count differs from the image");
  const Index kt = in.k_t();
  require(in.k0 >= 1 && kt >= 1, ErrorCode::Range, "severity must be below K0");
  require(payload.palette.rows() == kt && payload.palette.cols() == in.channels, ErrorCode::DimensionMismatch,
          "palette must be K_t x C");
  require(payload.table.alphabet_size() == static_cast<std::size_t>(kt), ErrorCode::DimensionMismatch,
          "code table must have K_t entries");
  require(payload.indices.width == in.width && payload.indices.height == in.height, ErrorCode::DimensionMismatch,
          "index map dimensions differ from the header");

  const BitBuffer bits = huffman_encode(payload.indices, payload.table);
  require(bits.bytes.size() <= std::numeric_limits<std::uint32_t>::max(), ErrorCode::Config,
          "index payload too large");

  EncodedImage out;
  out.header = in;
  out.header.palette_bytes = static_cast<std::uint32_t>(kt * in.channels);
  out.header.table_bytes = static_cast<std::uint32_t>(kt);
  out.header.index_bytes = static_cast<std::uint32_t>(bits.bytes.size());
  out.index_bits = bits.bit_count;

  ByteWriter w;
  w.bytes(kContainerMagic);
  w.u8(kContainerVersion);
  w.u32(out.header.width);
  w.u32(out.header.height);
  w.u8(out.header.channels);
  w.u16(out.header.k0);
  w.u16(out.header.severity);
  w.u8(static_cast<std::uint8_t>(out.header.quantizer.mode));
  if (out.header.quantizer.mode == QuantizerMode::PerChannelMinMax) {
    for (const auto& ch : out.header.quantizer.channels) {
      w.f64(ch.scale);
      w.f64(ch.offset);
    }
  }
  w.u32(out.header.palette_bytes);
  w.u32(out.header.table_bytes);
  w.u32(out.header.index_bytes);
  w.bytes(std::span(payload.palette.data(), static_cast<std::size_t>(payload.palette.size())));
  w.bytes(payload.table.lengths());
  w.bytes(bits.bytes);
  out.bytes = w.take();
  return out;
}

ContainerPayload parse_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ContainerPayload p;
  BitstreamHeader& h = p.header;

  const auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kContainerMagic.begin())) {
    throw Error(ErrorCode::Format, "bad magic, not a PDC1 container", 0);
  }
  const std::uint8_t version = r.u8("version");
  if (version != kContainerVersion) {
    throw Error(ErrorCode::Format, "unsupported container version " + std::to_string(version), 4);
  }
  h.width = r.u32("width");
  h.height = r.u32("height");
  h.channels = r.u8("channels");
  h.k0 = r.u16("K0");
  const std::size_t severity_at = r.position();
  h.severity = r.u16("severity");
  if (h.width == 0 || h.height == 0 || h.channels == 0) throw Error(ErrorCode::Format, "zero image dimension", 5);
  if (h.k0 == 0 || h.severity >= h.k0) {
    throw Error(ErrorCode::Format, "severity " + std::to_string(h.severity) + " not below K0 " + std::to_string(h.k0),
                severity_at);
  }
  const std::size_t mode_at = r.position();
  const std::uint8_t mode = r.u8("quantizer mode");
  if (mode == static_cast<std::uint8_t>(QuantizerMode::FixedUnitRange)) {
    h.quantizer = QuantizerConfig::fixed_unit_range();
  } else if (mode == static_cast<std::uint8_t>(QuantizerMode::PerChannelMinMax)) {
    h.quantizer.mode = QuantizerMode::PerChannelMinMax;
    for (std::uint8_t c = 0; c < h.channels; ++c) {
      const std::size_t at = r.position();
      ChannelAffine a;
      a.scale = r.f64("quantizer scale");
      a.offset = r.f64("quantizer offset");
      if (!(std::isfinite(a.scale) && std::isfinite(a.offset) && a.scale > 0.0)) {
        throw Error(ErrorCode::Format, "invalid quantizer parameters", at);
      }
      h.quantizer.channels.push_back(a);
    }
  } else {
    throw Error(ErrorCode::Format, "unknown quantizer mode " + std::to_string(mode), mode_at);
  }

  const Index kt = h.k_t();
  const std::size_t lengths_at = r.position();
  h.palette_bytes = r.u32("palette length");
  h.table_bytes = r.u32("table length");
  h.index_bytes = r.u32("index length");
  if (h.palette_bytes != static_cast<std::uint64_t>(kt) * h.channels) {
    throw Error(ErrorCode::Format, "palette length does not equal K_t * C", lengths_at);
  }
  if (h.table_bytes != static_cast<std::uint64_t>(kt)) {
    throw Error(ErrorCode::Format, "code table length does not equal K_t", lengths_at + 4);
  }
  const std::uint64_t expected_end = r.position() + std::uint64_t{h.palette_bytes} + h.table_bytes + h.index_bytes;
  if (expected_end != bytes.size()) {
    throw Error(ErrorCode::Format,
                "container is " + std::to_string(bytes.size()) + " bytes, header implies " +
                    std::to_string(expected_end),
                lengths_at);
  }

  const auto pal = r.take(h.palette_bytes, "palette");
  p.palette.resize(kt, h.channels);
  std::memcpy(p.palette.data(), pal.data(), pal.size());

  const std::size_t table_at = r.position();
  const auto lens = r.take(h.table_bytes, "code table");
  try {
    p.table = HuffmanTable::from_lengths(std::vector<std::uint8_t>(lens.begin(), lens.end()));
  } catch (const Error& e) {
    throw Error(ErrorCode::Format, std::string("invalid code table: ") + e.what(), table_at);
  }

  const std::size_t index_at = r.position();
  const auto payload = r.take(h.index_bytes, "index payload");
  const std::uint64_t cells = std::uint64_t{h.width} * h.height;
  std::uint64_t used = 0;
  p.indices.width = h.width;
  p.indices.height = h.height;
  p.indices.indices = huffman_decode(payload, p.table, cells, &used);
  if ((used + 7) / 8 != payload.size()) {
    throw Error(ErrorCode::Format, "index payload has trailing bytes", index_at + (used + 7) / 8);
  }
  return p;
}

DecodedImage decode_container(std::span<const std::uint8_t> bytes) {
  DecodedImage d;
  d.payload = parse_container(bytes);
  const BitstreamHeader& h = d.payload.header;
  d.severity = Severity(h.severity);
  d.palette.centroids = d.payload.palette.cast<double>();
  d.palette.sizes = Eigen::Matrix<Index, Eigen::Dynamic, 1>::Zero(d.palette.centroids.rows());
  for (Index i = 0; i < d.payload.indices.indices.size(); ++i) ++d.palette.sizes(d.payload.indices.indices(i));
  d.values = render_values(d.palette, d.payload.indices);
  return d;
}

DegradedState attach_chain(const DecodedImage& decoded, std::shared_ptr<const PaletteChain> chain) {
  require(chain != nullptr, ErrorCode::InvalidInput, "null chain");
  const BitstreamHeader& h = decoded.payload.header;
  require(chain->base_k() == h.k0 && chain->width() == h.width && chain->height() == h.height &&
              chain->channels() == h.channels,
          ErrorCode::Consistency, "chain does not match the container header");
  DegradedState s = degrade(std::move(chain), decoded.severity);
  require(s.indices == decoded.payload.indices, ErrorCode::Consistency, "chain indices differ from the container");
  require(round_palette(s.palette()) == decoded.payload.palette, ErrorCode::Consistency,
          "chain palette differs from the container");
  return s;
}

ChainBuild build_chain(const QuantizedTensor& q, const EncoderOptions& opts, QuantizerConfig quantizer) {
  KMeansOptions km;
  km.k = opts.k0;
  km.seed = opts.seed;
  km.max_iters = opts.max_iters;
  km.single_pass = opts.single_pass_kmeans;
  km.init = opts.init;
  km.threads = opts.threads;
  KMeansResult base = kmeans_palette(q, km);
  ChainBuild b;
  b.quantizer = std::move(quantizer);
  b.quantized = q;
  b.base_sse = base.sse;
  b.chain = std::make_shared<const PaletteChain>(base.palette, base.assignment);
  return b;
}

ChainBuild build_chain(const FeatureTensor& z, const EncoderOptions& opts) {
  QuantizerConfig cfg = opts.quantizer == QuantizerMode::PerChannelMinMax ? QuantizerConfig::fit_minmax(z)
                                                                          : QuantizerConfig::fixed_unit_range();
  const QuantizedTensor q = quantize(z, cfg);
  return build_chain(q, opts, std::move(cfg));
}

}  // namespace pdc
