#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pdc/tensor.hpp"

namespace pdc {

// .ften: magic "FTEN", version u8 (1), H u32, W u32, C u32, then H*W*C
// little-endian f32 values in (H, W, C) order.
inline constexpr std::uint8_t kFtenVersion = 1;

std::vector<std::uint8_t> encode_ften(const FeatureTensor& t);
/// Values are widened from f32, so encode_ften(decode_ften(b)) == b.
FeatureTensor decode_ften(std::span<const std::uint8_t> bytes);

void write_ften(const std::filesystem::path& path, const FeatureTensor& t);
FeatureTensor read_ften(const std::filesystem::path& path);

struct ImageReadResult {
  QuantizedTensor image;  // 1 channel for gray input, 3 otherwise
  std::vector<std::string> warnings;
};

/// 8-bit PNG. Alpha is dropped with a warning; 16-bit samples are reduced
/// to 8 bits with a warning.
ImageReadResult read_image(const std::filesystem::path& path);
/// Writes 1 (gray), 3 (RGB) or 4 (RGBA) channel tensors.
void write_image(const std::filesystem::path& path, const QuantizedTensor& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Case-insensitive extension test, e.g. has_extension(p, ".png").
bool has_extension(const std::filesystem::path& path, std::string_view ext);

}  // namespace pdc
