#pragma once

#include <cstdint>
#include <Eigen/Core>

#include "pdc/error.hpp"

namespace pdc {

using Eigen::Index;

/// Dense W x H x C tensor stored as a (H*W) x C row-major matrix, i.e. the
/// (H, W, C) layout flattened with channels fastest. Each matrix row is one
/// spatial cell's channel vector.
template <typename Scalar>
class Tensor {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tensor() = default;

  Tensor(Index width, Index height, Index channels)
      : width_(width), height_(height), data_(Matrix::Zero(width * height, channels)) {
    check_dims(width, height, channels);
  }

  Tensor(Index width, Index height, Index channels, Matrix data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height, channels);
    require(data_.rows() == width * height && data_.cols() == channels,
            ErrorCode::DimensionMismatch, "tensor data does not match width*height x channels");
  }

  Index width() const noexcept { return width_; }
  Index height() const noexcept { return height_; }
  Index channels() const noexcept { return data_.cols(); }
  Index cells() const noexcept { return width_ * height_; }
  Index size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.size() == 0; }

  const Matrix& matrix() const noexcept { return data_; }
  Matrix& matrix() noexcept { return data_; }

  Scalar operator()(Index y, Index x, Index c) const { return data_(y * width_ + x, c); }
  Scalar& operator()(Index y, Index x, Index c) { return data_(y * width_ + x, c); }

  const Scalar* data() const noexcept { return data_.data(); }
  Scalar* data() noexcept { return data_.data(); }

  bool same_shape(const Tensor& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels() == other.channels();
  }

  template <typename Other>
  bool same_shape(const Tensor<Other>& other) const noexcept {
    return width_ == other.width() && height_ == other.height() && channels() == other.channels();
  }

  template <typename NewScalar>
  Tensor<NewScalar> cast() const {
    return Tensor<NewScalar>(width_, height_, channels(), data_.template cast<NewScalar>());
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  static void check_dims(Index w, Index h, Index c) {
    require(w >= 1 && h >= 1 && c >= 1, ErrorCode::InvalidInput,
            "tensor dimensions must all be >= 1");
  }

  Index width_ = 0;
  Index height_ = 0;
  Matrix data_;
};

using FeatureTensor = Tensor<double>;
using QuantizedTensor = Tensor<std::uint8_t>;

using IndexVector = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1>;

/// Per-cell palette indices in row-major (H, W) order.
struct IndexMap {
  Index width = 0;
  Index height = 0;
  IndexVector indices;

  Index cells() const noexcept { return width * height; }
  std::uint32_t operator()(Index y, Index x) const { return indices(y * width + x); }

  friend bool operator==(const IndexMap& a, const IndexMap& b) {
    return a.width == b.width && a.height == b.height && a.indices == b.indices;
  }
};

/// True when every value is finite.
template <typename Scalar>
bool all_finite(const Tensor<Scalar>& t) {
  return t.matrix().allFinite();
}

}  // namespace pdc
