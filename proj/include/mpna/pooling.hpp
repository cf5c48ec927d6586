#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "mpna/error.hpp"
#include "mpna/layer.hpp"
#include "mpna/tensor.hpp"

namespace mpna {

template <typename Scalar>
Scalar activate(Scalar x, const Activation& act) {
  switch (act.kind) {
    case ActivationKind::None:
      return x;
    case ActivationKind::ReLU:
      return x < 0 ? Scalar{0} : x;
    case ActivationKind::LeakyReLU:
      // Arithmetic shift: floor(x / 2^k), monotone non-decreasing.
      return x < 0 ? static_cast<Scalar>(x >> act.slope_shift) : x;
  }
  return x;
}

template <typename Scalar>
Tensor3<Scalar> max_pool(const Tensor3<Scalar>& map, const PoolSpec& pool) {
  if (pool.window < 1 || pool.stride < 1) throw InvalidConfig("pool window and stride must be >= 1");
  if (pool.window > map.rows() || pool.window > map.cols())
    throw ShapeMismatch("pool window " + std::to_string(pool.window) + " larger than map " +
                        std::to_string(map.rows()) + "x" + std::to_string(map.cols()));
  if ((map.rows() - pool.window) % pool.stride != 0 || (map.cols() - pool.window) % pool.stride != 0)
    throw ShapeMismatch("pool window/stride leave a partial window on a " + std::to_string(map.rows()) + "x" +
                        std::to_string(map.cols()) + " map");
  const Index out_rows = (map.rows() - pool.window) / pool.stride + 1;
  const Index out_cols = (map.cols() - pool.window) / pool.stride + 1;
  Tensor3<Scalar> out(map.channels(), out_rows, out_cols);
  for (Index c = 0; c < map.channels(); ++c)
    for (Index r = 0; r < out_rows; ++r)
      for (Index k = 0; k < out_cols; ++k) {
        Scalar best = std::numeric_limits<Scalar>::lowest();
        for (Index i = 0; i < pool.window; ++i)
          for (Index j = 0; j < pool.window; ++j)
            best = std::max(best, map(c, r * pool.stride + i, k * pool.stride + j));
        out(c, r, k) = best;
      }
  return out;
}

/// Pooling and activation unit: MaxPooling first, then the activation. For a
/// monotone activation this equals activating before pooling, with fewer
/// activation evaluations.
template <typename Scalar>
Tensor3<Scalar> pool_activate(const Tensor3<Scalar>& map, const std::optional<PoolSpec>& pool,
                              const Activation& act) {
  Tensor3<Scalar> out = pool ? max_pool(map, *pool) : map;
  out.matrix() = out.matrix().unaryExpr([&act](Scalar v) { return activate(v, act); });
  return out;
}

}  // namespace mpna
