#pragma once

#include <optional>
#include <random>
#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/plan.hpp"
#include "mpna/systolic.hpp"
#include "mpna/tensor.hpp"

namespace mpna {

/// Direct evaluation of the six-deep loop nest with zero padding; wide
/// results, no activation or pooling. FC layers accept any input whose
/// element count is I and produce J x 1 x 1. Throws ShapeMismatch.
WideTensor oracle_conv(const QuantTensor& input, const QuantFilters& filters, const LayerDescriptor& layer);

/// Elements moved between DRAM and the chip while executing a plan.
struct TransferLog {
  Index dram_in_act = 0;
  Index dram_out_act = 0;
  Index dram_weights = 0;
  Index sa_conv_tiles = 0;   // weight tiles run on SA-CONV
  Index sa_fc_vectors = 0;   // input vectors streamed through SA-FC
  Index accumulations = 0;   // SPM adder operations

  Index dram_total() const { return dram_in_act + dram_out_act + dram_weights; }
};

struct LayerRun {
  WideTensor output;  // after pooling and activation, before requantization
  TransferLog log;
};

/// Executes one CONV/FC layer as scheduled by `plan`: CONV tiles on SA-CONV,
/// FC tiles on SA-FC, partial sums through the accumulator bank, then the
/// pooling and activation unit. DRAM transfers are logged from what the
/// buffers actually have to fetch under the plan's residency choices.
/// `trace`, if given, receives the firing log of every array run.
LayerRun execute_layer(const LayerDescriptor& layer, const QuantTensor& input, const QuantFilters& filters,
                       const HardwareConfig& cfg, const DataflowPlan& plan, ArrayTrace* trace = nullptr);

/// Filters per layer; empty for pooling layers.
struct NetworkWeights {
  std::vector<QuantFilters> layers;
};

/// Uniform int8 filters for every layer.
template <typename Rng>
NetworkWeights random_weights(const NetworkDescriptor& net, Rng& rng) {
  NetworkWeights w;
  for (const auto& l : net.layers) w.layers.push_back(l.has_weights() ? random_filters(l, rng) : QuantFilters{});
  return w;
}

struct NetworkRun {
  QuantTensor output;
  std::vector<int> shifts;  // requantization shift per layer
  std::vector<TransferLog> logs;
};

/// Runs the network layer by layer on the simulated arrays. Each layer's
/// output is pooled/activated, then requantized to int8 with the smallest
/// right shift that fits.
NetworkRun simulate_network(const NetworkDescriptor& net, const QuantTensor& input, const NetworkWeights& weights,
                            const HardwareConfig& cfg, const std::vector<std::optional<DataflowPlan>>& plans,
                            ArrayTrace* trace = nullptr);

/// Same composition using oracle_conv and the same requantization.
NetworkRun oracle_network(const NetworkDescriptor& net, const QuantTensor& input, const NetworkWeights& weights);

}  // namespace mpna
