#pragma once

#include "mpna/layer.hpp"

namespace mpna {

enum class LoopOrder {
  BlockOuter,   // output block -> filter group -> channel chunk
  FilterOuter,  // filter group -> output block -> channel chunk
};

/// How much of the input feature maps stays in the data buffer.
enum class InputResidency {
  Streamed,  // only the current channel chunk of the current block window
  PerBlock,  // all channels of the current block window (BlockOuter only)
  Whole,     // the complete input
};

/// Where the layer's activations live outside the layer itself.
struct LayerBoundary {
  bool input_in_dram = true;    // false: input already resident in the data buffer
  bool output_to_dram = true;   // true: output must end up in DRAM

  friend bool operator==(const LayerBoundary&, const LayerBoundary&) = default;
};

/// Tile of the loop nest. `filters` is a multiple of L; `channels` * P * Q is a
/// multiple of K unless it covers all input channels.
struct TileShape {
  Index filters = 1;
  Index channels = 1;
  Index block_rows = 1;
  Index block_cols = 1;

  friend bool operator==(const TileShape&, const TileShape&) = default;
};

struct OnChipAccesses {
  Index data_buffer = 0;
  Index weight_buffer = 0;
  Index spm = 0;

  Index total() const { return data_buffer + weight_buffer + spm; }
  friend bool operator==(const OnChipAccesses&, const OnChipAccesses&) = default;
};

/// Element counts moved per memory level.
struct Traffic {
  Index dram_in_act = 0;
  Index dram_out_act = 0;
  Index dram_weights = 0;
  OnChipAccesses onchip;

  Index dram_total() const { return dram_in_act + dram_out_act + dram_weights; }
  friend bool operator==(const Traffic&, const Traffic&) = default;
};

/// Location of one filter's output block inside the accumulation unit.
struct SpmSlot {
  Index bank = 0;
  Index base_address = 0;
};

struct DataflowPlan {
  int case_id = 1;
  TileShape tiles;
  LoopOrder order = LoopOrder::FilterOuter;
  bool weights_pinned = false;          // whole weight set held in the weight buffer
  bool group_weights_resident = false;  // FilterOuter: complete filters of a group held
  InputResidency input = InputResidency::Whole;
  bool output_resident = false;         // output kept in the data buffer for the next layer
  LayerBoundary boundary;
  Traffic traffic;

  /// OF-to-SPM map: filter f of a group goes to sub-unit f mod L; the
  /// group's filters sharing a sub-unit are stacked block after block.
  SpmSlot spm_slot(Index filter_in_group, Index array_cols) const {
    return {filter_in_group % array_cols, (filter_in_group / array_cols) * tiles.block_rows * tiles.block_cols};
  }
};

const char* to_string(LoopOrder order);
const char* to_string(InputResidency residency);

}  // namespace mpna
