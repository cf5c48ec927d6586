#include "mpna/layer.hpp"

#include <sstream>

#include "mpna/error.hpp"
#include "mpna/plan.hpp"

namespace mpna {

LayerDescriptor LayerDescriptor::conv(std::string name, Index in_maps, Index out_maps, Index out_size,
                                      Index kernel, Index stride, Index pad, Activation act,
                                      std::optional<PoolSpec> pool) {
  LayerDescriptor l;
  l.name = std::move(name);
  l.kind = LayerKind::Conv;
  l.in_maps = in_maps;
  l.out_maps = out_maps;
  l.out_rows = l.out_cols = out_size;
  l.kernel_rows = l.kernel_cols = kernel;
  l.stride = stride;
  l.pad = pad;
  l.activation = act;
  l.pool = pool;
  return l;
}

LayerDescriptor LayerDescriptor::fully_connected(std::string name, Index in_features, Index out_features,
                                                 Activation act) {
  LayerDescriptor l;
  l.name = std::move(name);
  l.kind = LayerKind::FullyConnected;
  l.in_maps = in_features;
  l.out_maps = out_features;
  l.activation = act;
  return l;
}

LayerDescriptor LayerDescriptor::max_pool(std::string name, Index maps, Index out_size, Index window,
                                          Index stride) {
  LayerDescriptor l;
  l.name = std::move(name);
  l.kind = LayerKind::MaxPool;
  l.in_maps = l.out_maps = maps;
  l.out_rows = l.out_cols = out_size;
  l.kernel_rows = l.kernel_cols = window;
  l.stride = stride;
  l.activation = Activation::none();
  return l;
}

Index LayerDescriptor::pooled_rows() const { return pool ? (out_rows - pool->window) / pool->stride + 1 : out_rows; }
Index LayerDescriptor::pooled_cols() const { return pool ? (out_cols - pool->window) / pool->stride + 1 : out_cols; }

void LayerDescriptor::validate() const {
  auto fail = [this](const std::string& what) { throw InvalidConfig("layer " + name + ": " + what); };
  if (in_maps < 1 || out_maps < 1 || out_rows < 1 || out_cols < 1 || kernel_rows < 1 || kernel_cols < 1)
    fail("all extents must be >= 1");
  if (stride < 1) fail("stride must be >= 1");
  if (pad < 0) fail("pad must be >= 0");
  if (pad >= kernel_rows || pad >= kernel_cols) fail("pad must be smaller than the kernel");
  if (in_rows() < 1 || in_cols() < 1) fail("padding leaves an empty input");
  if (activation.slope_shift < 0 || activation.slope_shift > 15) fail("leaky-relu slope shift must be in [0, 15]");
  switch (kind) {
    case LayerKind::FullyConnected:
      if (out_rows != 1 || out_cols != 1 || kernel_rows != 1 || kernel_cols != 1 || stride != 1 || pad != 0)
        fail("fully-connected layers need M=N=P=Q=S=1 and no padding");
      if (pool) fail("fully-connected layers cannot carry a pooling stage");
      break;
    case LayerKind::MaxPool:
      if (in_maps != out_maps) fail("pooling layers need J == I");
      if (pad != 0) fail("pooling layers take no padding");
      if (pool) fail("pooling layers cannot carry a fused pooling stage");
      break;
    case LayerKind::Conv:
      break;
  }
  if (pool) {
    if (pool->window < 1 || pool->stride < 1) fail("pool window and stride must be >= 1");
    if (pool->window > out_rows || pool->window > out_cols) fail("pool window larger than the output map");
    if ((out_rows - pool->window) % pool->stride != 0 || (out_cols - pool->window) % pool->stride != 0)
      fail("pool window/stride must tile the output map exactly");
  }
}

void NetworkDescriptor::validate() const {
  if (layers.empty()) throw InvalidConfig("network " + name + " has no layers");
  for (const auto& l : layers) l.validate();
  for (std::size_t k = 1; k < layers.size(); ++k) {
    const auto& prev = layers[k - 1];
    const auto& next = layers[k];
    bool ok;
    if (next.kind == LayerKind::FullyConnected)
      ok = next.in_maps == prev.output_volume();
    else
      ok = next.in_maps == prev.out_maps && next.in_rows() == prev.pooled_rows() && next.in_cols() == prev.pooled_cols();
    if (!ok) {
      std::ostringstream os;
      os << "network " << name << ": layer " << next.name << " expects input " << next.in_maps << "x"
         << next.in_rows() << "x" << next.in_cols() << " but " << prev.name << " produces " << prev.out_maps << "x"
         << prev.pooled_rows() << "x" << prev.pooled_cols();
      throw InvalidConfig(os.str());
    }
  }
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv:
      return "conv";
    case LayerKind::FullyConnected:
      return "fc";
    case LayerKind::MaxPool:
      return "maxpool";
  }
  return "?";
}

std::string to_string(const Activation& act) {
  switch (act.kind) {
    case ActivationKind::None:
      return "none";
    case ActivationKind::ReLU:
      return "relu";
    case ActivationKind::LeakyReLU:
      return "leaky_relu:" + std::to_string(act.slope_shift);
  }
  return "?";
}

const char* to_string(LoopOrder order) { return order == LoopOrder::BlockOuter ? "block_outer" : "filter_outer"; }

const char* to_string(InputResidency residency) {
  switch (residency) {
    case InputResidency::Streamed:
      return "streamed";
    case InputResidency::PerBlock:
      return "per_block";
    case InputResidency::Whole:
      return "whole";
  }
  return "?";
}

}  // namespace mpna
