#include "mpna/model.hpp"

#include <algorithm>
#include <cctype>

#include "mpna/error.hpp"

namespace mpna {

namespace {

void require_weights(const LayerDescriptor& layer, const char* op) {
  if (!layer.has_weights())
    throw NotApplicable(std::string(op) + " is undefined for pooling layer " + layer.name);
}

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

}  // namespace

Index mac_count(const LayerDescriptor& layer) {
  require_weights(layer, "mac_count");
  return layer.out_maps * layer.out_rows * layer.out_cols * layer.in_maps * layer.kernel_rows * layer.kernel_cols;
}

Index weight_count(const LayerDescriptor& layer) {
  require_weights(layer, "weight_count");
  return layer.out_maps * layer.in_maps * layer.kernel_rows * layer.kernel_cols;
}

ReuseProfile reuse_profile(const LayerDescriptor& layer) {
  require_weights(layer, "reuse_profile");
  ReuseProfile r;
  r.output_act_reuse = layer.in_maps * layer.kernel_rows * layer.kernel_cols;
  r.weight_reuse = layer.out_rows * layer.out_cols;
  // An interior activation is covered by ceil(P/S) output rows and ceil(Q/S)
  // output cols of every filter.
  r.input_act_reuse =
      layer.out_maps * ceil_div(layer.kernel_rows, layer.stride) * ceil_div(layer.kernel_cols, layer.stride);
  return r;
}

NetworkTotals network_totals(const NetworkDescriptor& net) {
  NetworkTotals t;
  for (const auto& l : net.layers) {
    if (l.kind == LayerKind::Conv) {
      t.conv_macs += mac_count(l);
      t.conv_weights += weight_count(l);
    } else if (l.kind == LayerKind::FullyConnected) {
      t.fc_macs += mac_count(l);
      t.fc_weights += weight_count(l);
    }
  }
  return t;
}

namespace {

NetworkDescriptor alexnet() {
  using L = LayerDescriptor;
  const auto relu = Activation::relu();
  const PoolSpec pool{3, 2};
  NetworkDescriptor net{"alexnet", {}};
  net.layers = {
      L::conv("conv1", 3, 96, 55, 11, 4, 0, relu, pool),
      L::conv("conv2", 96, 256, 27, 5, 1, 2, relu, pool),
      L::conv("conv3", 256, 384, 13, 3, 1, 1, relu),
      L::conv("conv4", 384, 384, 13, 3, 1, 1, relu),
      L::conv("conv5", 384, 256, 13, 3, 1, 1, relu, pool),
      L::fully_connected("fc6", 256 * 6 * 6, 4096, relu),
      L::fully_connected("fc7", 4096, 4096, relu),
      L::fully_connected("fc8", 4096, 1000, Activation::none()),
  };
  return net;
}

NetworkDescriptor vgg16() {
  using L = LayerDescriptor;
  const auto relu = Activation::relu();
  const PoolSpec pool{2, 2};
  NetworkDescriptor net{"vgg16", {}};
  struct Stage {
    int convs;
    Index in, out, size;
  };
  const Stage stages[] = {{2, 3, 64, 224}, {2, 64, 128, 112}, {3, 128, 256, 56}, {3, 256, 512, 28}, {3, 512, 512, 14}};
  int s = 1;
  for (const auto& st : stages) {
    for (int c = 1; c <= st.convs; ++c) {
      const bool last = c == st.convs;
      net.layers.push_back(L::conv("conv" + std::to_string(s) + "_" + std::to_string(c), c == 1 ? st.in : st.out, st.out,
                                   st.size, 3, 1, 1, relu, last ? std::optional<PoolSpec>(pool) : std::nullopt));
    }
    ++s;
  }
  net.layers.push_back(L::fully_connected("fc6", 512 * 7 * 7, 4096, relu));
  net.layers.push_back(L::fully_connected("fc7", 4096, 4096, relu));
  net.layers.push_back(L::fully_connected("fc8", 4096, 1000, Activation::none()));
  return net;
}

}  // namespace

std::vector<NetworkDescriptor> builtin_networks() { return {alexnet(), vgg16()}; }

NetworkDescriptor builtin_network(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  key.erase(std::remove(key.begin(), key.end(), '-'), key.end());
  for (auto& net : builtin_networks())
    if (net.name == key) return net;
  throw InvalidConfig("unknown builtin network '" + name + "' (expected alexnet or vgg16)");
}

}  // namespace mpna
