#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/plan.hpp"

namespace mpna {

enum class Bound { ComputeBound, MemoryBound };

const char* to_string(Bound bound);

/// Cycle breakdown of one layer. The compute side is the slowest array's
/// streaming + exposed preload + fill/drain; DRAM transfers overlap with it.
struct LayerTiming {
  std::int64_t compute_cycles = 0;      // input vectors streamed
  std::int64_t weight_load_cycles = 0;  // preload not hidden by the shadow register
  std::int64_t fill_drain_cycles = 0;
  std::int64_t dram_transfer_cycles = 0;
  std::int64_t total_cycles = 0;
  Bound bound = Bound::ComputeBound;
  Index arrays = 1;    // arrays working on the layer
  Index tiles = 0;     // K x L weight tiles issued
  Index macs = 0;

  std::int64_t compute_side() const { return compute_cycles + weight_load_cycles + fill_drain_cycles; }
  /// MACs / (total_cycles * K * L * arrays).
  double utilization(const HardwareConfig& cfg) const;
};

/// One weight tile in issue order: `vectors` input vectors stream through it.
struct TileIssue {
  Index vectors = 0;
  int array = 0;  // 0: SA-CONV, 1: SA-FC
};

/// Weight tiles of `plan` in issue order. With `dual`, column groups of
/// consecutive (block, filter group) steps alternate between the two arrays;
/// otherwise everything goes to `single_array`.
std::vector<TileIssue> tile_schedule(const LayerDescriptor& layer, const DataflowPlan& plan,
                                     const HardwareConfig& cfg, bool dual, int single_array = 0);

/// SA-CONV alone. Per tile: T streaming cycles; the next tile's K-cycle
/// preload runs in the shadow registers meanwhile, so only max(0, K - T) is
/// exposed. Weights switch with the wavefront, so the K + L - 1 fill/drain is
/// paid once per layer. DRAM cycles come from the plan's traffic.
LayerTiming time_sa_conv(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan);

/// SA-FC alone: weights arrive every cycle over dedicated links, so there is
/// no preload; one fill/drain per layer.
LayerTiming time_sa_fc(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan);

/// Both arrays time-multiplexed on one CONV layer. DRAM bandwidth is shared.
LayerTiming time_dual_conv(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan);

enum class Architecture {
  Conventional,  // one SA-CONV-style array for every layer
  Mpna,          // CONV on both arrays, FC on SA-FC
};

const char* to_string(Architecture arch);

LayerTiming time_layer(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan,
                       Architecture arch);

struct NetworkTiming {
  std::vector<std::optional<LayerTiming>> layers;  // empty for pooling layers
  std::int64_t conv_cycles = 0;
  std::int64_t fc_cycles = 0;

  std::int64_t total_cycles() const { return conv_cycles + fc_cycles; }
};

NetworkTiming time_network(const NetworkDescriptor& net, const HardwareConfig& cfg,
                           const std::vector<std::optional<DataflowPlan>>& plans, Architecture arch);

struct SpeedupRow {
  Index rows = 1;
  Index cols = 1;
  NetworkTiming conventional;
  NetworkTiming mpna;
  double conventional_conv_speedup = 1;  // vs the 1x1 conventional array
  double conventional_fc_speedup = 1;
  double mpna_conv_speedup = 1;          // vs the 1x1 MPNA configuration
  double mpna_fc_speedup = 1;
  double mpna_vs_conventional = 1;       // whole network, same array size
};

/// Evaluates every array size (independently, in parallel) and normalizes to
/// the 1x1 array. Rows come back in the order of `sizes`.
std::vector<SpeedupRow> speedup_report(const NetworkDescriptor& net, const HardwareConfig& base,
                                       const std::vector<std::pair<Index, Index>>& sizes);

}  // namespace mpna
