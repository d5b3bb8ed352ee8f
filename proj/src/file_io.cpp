#include "pdc/file_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <png.h>

#include "pdc/byte_io.hpp"

namespace pdc {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorCode::Io, "write failed for " + path.string());
}

bool has_extension(const std::filesystem::path& path, std::string_view ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

std::vector<std::uint8_t> encode_ften(const FeatureTensor& t) {
  require(!t.empty(), ErrorCode::InvalidInput, "cannot write an empty tensor");
  ByteWriter w;
  w.bytes(std::string_view("FTEN"));
  w.u8(kFtenVersion);
  w.u32(static_cast<std::uint32_t>(t.height()));
  w.u32(static_cast<std::uint32_t>(t.width()));
  w.u32(static_cast<std::uint32_t>(t.channels()));
  for (Index i = 0; i < t.size(); ++i) {
    const double v = t.data()[i];
    require(std::isfinite(v) && std::abs(v) <= std::numeric_limits<float>::max(), ErrorCode::InvalidInput,
            "value not representable as a finite f32");
    w.f32(static_cast<float>(v));
  }
  return w.take();
}

FeatureTensor decode_ften(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), "FTEN", 4) != 0) throw Error(ErrorCode::Format, "bad magic, not an FTEN file", 0);
  const std::uint8_t version = r.u8("version");
  if (version != kFtenVersion) throw Error(ErrorCode::Format, "unsupported FTEN version " + std::to_string(version), 4);
  const std::uint32_t h = r.u32("height");
  const std::uint32_t w = r.u32("width");
  const std::uint32_t c = r.u32("channels");
  if (h == 0 || w == 0 || c == 0) throw Error(ErrorCode::Format, "zero tensor dimension", 5);
  const std::uint64_t count = std::uint64_t{h} * w * c;
  if (count * 4 != r.remaining()) {
    throw Error(ErrorCode::Format,
                "payload holds " + std::to_string(r.remaining()) + " bytes, header implies " + std::to_string(count * 4),
                r.position());
  }
  FeatureTensor t(w, h, c);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.position();
    const float v = r.f32("value");
    if (!std::isfinite(v)) throw Error(ErrorCode::Format, "non-finite value", at);
    t.data()[i] = v;
  }
  return t;
}

void write_ften(const std::filesystem::path& path, const FeatureTensor& t) { write_file(path, encode_ften(t)); }

FeatureTensor read_ften(const std::filesystem::path& path) { return decode_ften(read_file(path)); }

namespace {

struct PngImage {
  png_image img{};
  PngImage() {
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

ImageReadResult read_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  PngImage png;
  if (png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size()) == 0) {
    throw Error(ErrorCode::Format, path.string() + ": " + png.img.message, 0);
  }
  ImageReadResult result;
  const bool color = (png.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  if ((png.img.format & PNG_FORMAT_FLAG_ALPHA) != 0) {
    result.warnings.push_back(path.string() + ": alpha channel dropped");
  }
  if ((png.img.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    result.warnings.push_back(path.string() + ": 16-bit samples reduced to 8 bits");
  }
  const bool alpha = (png.img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  const Index channels = color ? 3 : 1;
  const Index stride = channels + (alpha ? 1 : 0);
  png.img.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB) : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(png.img));
  if (png_image_finish_read(&png.img, nullptr, raw.data(), 0, nullptr) == 0) {
    throw Error(ErrorCode::Format, path.string() + ": " + png.img.message, 0);
  }
  QuantizedTensor t(png.img.width, png.img.height, channels);
  for (Index i = 0; i < t.cells(); ++i) {
    for (Index c = 0; c < channels; ++c) t.matrix()(i, c) = raw[static_cast<std::size_t>(i * stride + c)];
  }
  result.image = std::move(t);
  return result;
}

void write_image(const std::filesystem::path& path, const QuantizedTensor& image) {
  require(!image.empty(), ErrorCode::InvalidInput, "cannot write an empty image");
  PngImage png;
  png.img.width = static_cast<png_uint_32>(image.width());
  png.img.height = static_cast<png_uint_32>(image.height());
  switch (image.channels()) {
    case 1: png.img.format = PNG_FORMAT_GRAY; break;
    case 3: png.img.format = PNG_FORMAT_RGB; break;
    case 4: png.img.format = PNG_FORMAT_RGBA; break;
    default: fail(ErrorCode::InvalidInput, "PNG output needs 1, 3 or 4 channels, got " + std::to_string(image.channels()));
  }
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&png.img, nullptr, &size, 0, image.data(), 0, nullptr) == 0) {
    fail(ErrorCode::Io, std::string("PNG encoding failed: ") + png.img.message);
  }
  std::vector<std::uint8_t> buffer(size);
  if (png_image_write_to_memory(&png.img, buffer.data(), &size, 0, image.data(), 0, nullptr) == 0) {
    fail(ErrorCode::Io, std::string("PNG encoding failed: ") + png.img.message);
  }
  buffer.resize(size);
  write_file(path, buffer);
}

}  // namespace pdc
