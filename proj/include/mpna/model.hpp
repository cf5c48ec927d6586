#pragma once

#include <string>
#include <vector>

#include "mpna/layer.hpp"

namespace mpna {

/// Number of MAC operations in which each kind of datum takes part.
/// Input reuse is the interior (maximum) value; border activations take part
/// in fewer MACs.
struct ReuseProfile {
  Index input_act_reuse = 1;
  Index output_act_reuse = 1;
  Index weight_reuse = 1;

  friend bool operator==(const ReuseProfile&, const ReuseProfile&) = default;
};

/// J*M*N*I*P*Q. Throws NotApplicable for pooling layers.
Index mac_count(const LayerDescriptor& layer);

/// J*I*P*Q. Throws NotApplicable for pooling layers.
Index weight_count(const LayerDescriptor& layer);

/// Throws NotApplicable for pooling layers.
ReuseProfile reuse_profile(const LayerDescriptor& layer);

struct NetworkTotals {
  Index conv_macs = 0;
  Index fc_macs = 0;
  Index conv_weights = 0;
  Index fc_weights = 0;
};

NetworkTotals network_totals(const NetworkDescriptor& net);

/// AlexNet (single tower, no grouping) and VGG-16, in that order.
std::vector<NetworkDescriptor> builtin_networks();

/// Looks up "alexnet" or "vgg16" (case-insensitive). Throws InvalidConfig.
NetworkDescriptor builtin_network(const std::string& name);

}  // namespace mpna
