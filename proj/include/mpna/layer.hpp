#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mpna {

using Index = Eigen::Index;

enum class LayerKind { Conv, FullyConnected, MaxPool };

enum class ActivationKind { None, ReLU, LeakyReLU };

/// Element-wise non-linearity applied after accumulation. Leaky-ReLU multiplies
/// negative inputs by 2^-slope_shift using an arithmetic shift.
struct Activation {
  ActivationKind kind = ActivationKind::None;
  int slope_shift = 3;

  static Activation none() { return {}; }
  static Activation relu() { return {ActivationKind::ReLU, 3}; }
  static Activation leaky_relu(int slope_shift = 3) { return {ActivationKind::LeakyReLU, slope_shift}; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

struct PoolSpec {
  Index window = 1;
  Index stride = 1;

  friend bool operator==(const PoolSpec&, const PoolSpec&) = default;
};

/// Shape of one network layer using the I/J/M/N/P/Q convention.
///
/// I input maps, J output maps, M x N output extent, P x Q kernel extent.
/// The padded input extent is (M-1)*S+P by (N-1)*S+Q; `pad` zero rows/cols on
/// each border are not part of the stored input. FC layers are the 1x1 case
/// with I inputs and J outputs. A MaxPool layer uses P x Q as its window and
/// has no weights (J == I).
struct LayerDescriptor {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  Index in_maps = 1;
  Index out_maps = 1;
  Index out_rows = 1;
  Index out_cols = 1;
  Index kernel_rows = 1;
  Index kernel_cols = 1;
  Index stride = 1;
  Index pad = 0;
  Activation activation;
  std::optional<PoolSpec> pool;

  static LayerDescriptor conv(std::string name, Index in_maps, Index out_maps, Index out_size,
                              Index kernel, Index stride = 1, Index pad = 0,
                              Activation act = Activation::relu(),
                              std::optional<PoolSpec> pool = std::nullopt);
  static LayerDescriptor fully_connected(std::string name, Index in_features, Index out_features,
                                         Activation act = Activation::relu());
  static LayerDescriptor max_pool(std::string name, Index maps, Index out_size, Index window,
                                  Index stride);

  bool has_weights() const { return kind != LayerKind::MaxPool; }

  // Stored (unpadded) input extent.
  Index in_rows() const { return (out_rows - 1) * stride + kernel_rows - 2 * pad; }
  Index in_cols() const { return (out_cols - 1) * stride + kernel_cols - 2 * pad; }
  Index input_volume() const { return in_maps * in_rows() * in_cols(); }

  // Extent after the fused pooling stage, if any.
  Index pooled_rows() const;
  Index pooled_cols() const;
  Index output_volume() const { return out_maps * pooled_rows() * pooled_cols(); }
  Index raw_output_volume() const { return out_maps * out_rows * out_cols; }

  /// Throws InvalidConfig on any violated invariant.
  void validate() const;

  friend bool operator==(const LayerDescriptor&, const LayerDescriptor&) = default;
};

struct NetworkDescriptor {
  std::string name;
  std::vector<LayerDescriptor> layers;

  /// Validates every layer and the shape chain between consecutive layers.
  void validate() const;
};

std::string to_string(LayerKind kind);
std::string to_string(const Activation& act);

}  // namespace mpna
