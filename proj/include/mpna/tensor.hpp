#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Core>

#include "mpna/error.hpp"
#include "mpna/layer.hpp"

namespace mpna {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Wide accumulator type used by the PEs and the accumulation unit.
using Accum = std::int32_t;

/// Channel-major 3D tensor. Each row of the backing matrix is one 2D map
/// stored row-major, so `matrix().row(c)` is the flattened map of channel c.
template <typename Scalar>
class Tensor3 {
 public:
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tensor3() = default;
  Tensor3(Index channels, Index rows, Index cols)
      : rows_(rows), cols_(cols), data_(Storage::Zero(channels, rows * cols)) {}

  Index channels() const { return data_.rows(); }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return data_.size(); }

  Scalar& operator()(Index c, Index r, Index col) { return data_(c, r * cols_ + col); }
  Scalar operator()(Index c, Index r, Index col) const { return data_(c, r * cols_ + col); }

  /// Flat access in (c, r, col) order, as used when an FC layer flattens its input.
  Scalar& flat(Index i) { return data_.data()[i]; }
  Scalar flat(Index i) const { return data_.data()[i]; }

  Storage& matrix() { return data_; }
  const Storage& matrix() const { return data_; }

  template <typename Other>
  Tensor3<Other> cast() const {
    Tensor3<Other> out(channels(), rows_, cols_);
    out.matrix() = data_.template cast<Other>();
    return out;
  }

  /// Same data viewed as channels x 1 x 1 (for FC layers).
  Tensor3 flattened() const {
    Tensor3 out(size(), 1, 1);
    for (Index i = 0; i < size(); ++i) out.flat(i) = flat(i);
    return out;
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_.rows() == b.data_.rows() &&
           a.data_ == b.data_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Storage data_;
};

using QuantTensor = Tensor3<std::int8_t>;
using WideTensor = Tensor3<Accum>;

/// Filters of one layer, lowered: one row per filter j, one column per
/// (i, p, q) in that order, i.e. column (i*P + p)*Q + q.
template <typename Scalar>
class FilterBank {
 public:
  FilterBank() = default;
  FilterBank(Index filters, Index channels, Index rows, Index cols)
      : channels_(channels), rows_(rows), cols_(cols),
        data_(Matrix<Scalar>::Zero(filters, channels * rows * cols)) {}

  static FilterBank for_layer(const LayerDescriptor& layer) {
    return FilterBank(layer.out_maps, layer.in_maps, layer.kernel_rows, layer.kernel_cols);
  }

  Index filters() const { return data_.rows(); }
  Index channels() const { return channels_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  Scalar& operator()(Index j, Index i, Index p, Index q) { return data_(j, (i * rows_ + p) * cols_ + q); }
  Scalar operator()(Index j, Index i, Index p, Index q) const {
    return data_(j, (i * rows_ + p) * cols_ + q);
  }

  Matrix<Scalar>& matrix() { return data_; }
  const Matrix<Scalar>& matrix() const { return data_; }

 private:
  Index channels_ = 0;
  Index rows_ = 0;
  Index cols_ = 0;
  Matrix<Scalar> data_;
};

using QuantFilters = FilterBank<std::int8_t>;

inline void check_input_shape(const LayerDescriptor& layer, Index channels, Index rows, Index cols) {
  const bool fc = layer.kind == LayerKind::FullyConnected;
  const bool ok = fc ? channels * rows * cols == layer.in_maps
                     : channels == layer.in_maps && rows == layer.in_rows() && cols == layer.in_cols();
  if (!ok) {
    std::ostringstream os;
    os << "layer " << layer.name << ": input " << channels << "x" << rows << "x" << cols
       << " does not match descriptor " << layer.in_maps << "x" << layer.in_rows() << "x"
       << layer.in_cols();
    throw ShapeMismatch(os.str());
  }
}

/// Lowers the input into a (I*P*Q) x (M*N) matrix. Column m*N+n holds the
/// receptive field of output pixel (m, n); stride and zero padding are
/// absorbed here so the array only ever sees dense vectors.
template <typename Scalar>
Matrix<Scalar> im2col(const Tensor3<Scalar>& input, const LayerDescriptor& layer) {
  check_input_shape(layer, input.channels(), input.rows(), input.cols());
  if (layer.kind == LayerKind::FullyConnected) {
    Matrix<Scalar> out(layer.in_maps, 1);
    for (Index i = 0; i < layer.in_maps; ++i) out(i, 0) = input.flat(i);
    return out;
  }
  const Index P = layer.kernel_rows, Q = layer.kernel_cols, S = layer.stride, pad = layer.pad;
  const Index M = layer.out_rows, N = layer.out_cols;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(layer.in_maps * P * Q, M * N);
  for (Index i = 0; i < layer.in_maps; ++i)
    for (Index p = 0; p < P; ++p)
      for (Index q = 0; q < Q; ++q) {
        const Index row = (i * P + p) * Q + q;
        for (Index m = 0; m < M; ++m) {
          const Index r = m * S + p - pad;
          if (r < 0 || r >= input.rows()) continue;
          for (Index n = 0; n < N; ++n) {
            const Index c = n * S + q - pad;
            if (c < 0 || c >= input.cols()) continue;
            out(row, m * N + n) = input(i, r, c);
          }
        }
      }
  return out;
}

/// Right shift with round-half-up, saturating to int8.
inline std::int8_t requantize_value(Accum v, int shift) {
  std::int64_t x = v;
  if (shift > 0) x = (x + (std::int64_t{1} << (shift - 1))) >> shift;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(x, -128, 127));
}

/// Smallest shift that brings every value into int8 range after rounding.
template <typename Derived>
int requantize_shift(const Eigen::DenseBase<Derived>& values) {
  if (values.size() == 0) return 0;
  const std::int64_t hi = values.maxCoeff();
  const std::int64_t lo = values.minCoeff();
  int s = 0;
  auto rounded = [&](std::int64_t x) { return s == 0 ? x : (x + (std::int64_t{1} << (s - 1))) >> s; };
  while (rounded(hi) > 127 || rounded(lo) < -128) ++s;
  return s;
}

struct Requantized {
  QuantTensor tensor;
  int shift = 0;
};

inline Requantized requantize(const WideTensor& wide) {
  Requantized out{QuantTensor(wide.channels(), wide.rows(), wide.cols()), requantize_shift(wide.matrix())};
  out.tensor.matrix() = wide.matrix().unaryExpr([s = out.shift](Accum v) { return requantize_value(v, s); });
  return out;
}

/// Uniform over the full signed 8-bit range.
template <typename Derived, typename Rng>
void fill_random_int8(Eigen::DenseBase<Derived>& m, Rng& rng) {
  std::uniform_int_distribution<int> dist(-128, 127);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<std::int8_t>(dist(rng));
}

template <typename Rng>
QuantTensor random_tensor(Index channels, Index rows, Index cols, Rng& rng) {
  QuantTensor t(channels, rows, cols);
  fill_random_int8(t.matrix(), rng);
  return t;
}

template <typename Rng>
QuantFilters random_filters(const LayerDescriptor& layer, Rng& rng) {
  auto f = QuantFilters::for_layer(layer);
  fill_random_int8(f.matrix(), rng);
  return f;
}

}  // namespace mpna
