#pragma once

#include <algorithm>
#include <vector>

#include "mpna/plan.hpp"

namespace mpna {

/// Half-open range [begin, begin + size).
struct Span {
  Index begin = 0;
  Index size = 0;

  Index end() const { return begin + size; }
  friend bool operator==(const Span&, const Span&) = default;
};

inline Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }
inline Index round_up(Index a, Index b) { return ceil_div(a, b) * b; }

/// Cuts [0, extent) into consecutive spans of `tile` (last one may be short).
inline std::vector<Span> split(Index extent, Index tile) {
  std::vector<Span> out;
  for (Index b = 0; b < extent; b += tile) out.push_back({b, std::min(tile, extent - b)});
  return out;
}

/// Stored input rows (or cols) read by the output rows in `out`, clipped to
/// the unpadded input.
inline Span input_window(Span out, Index stride, Index kernel, Index pad, Index in_extent) {
  const Index lo = std::max<Index>(0, out.begin * stride - pad);
  const Index hi = std::min<Index>(in_extent, (out.end() - 1) * stride + kernel - pad);
  return {lo, std::max<Index>(0, hi - lo)};
}

/// One step of the tiled loop nest: a channel chunk of one filter group on
/// one output block.
struct ScheduleStep {
  Index block = 0;
  Span rows;
  Span cols;
  Index group = 0;
  Span filters;
  Index chunk = 0;
  Span channels;
  bool first_chunk = false;
  bool last_chunk = false;
};

/// Visits the steps of `plan` in loop order.
template <typename Visitor>
void for_each_step(const LayerDescriptor& layer, const DataflowPlan& plan, Visitor&& visit) {
  const auto row_spans = split(layer.out_rows, plan.tiles.block_rows);
  const auto col_spans = split(layer.out_cols, plan.tiles.block_cols);
  const auto groups = split(layer.out_maps, plan.tiles.filters);
  const auto chunks = split(layer.in_maps, plan.tiles.channels);
  const Index blocks = static_cast<Index>(row_spans.size() * col_spans.size());

  auto run_block_group = [&](Index b, Index g) {
    const Span rows = row_spans[static_cast<std::size_t>(b) / col_spans.size()];
    const Span cols = col_spans[static_cast<std::size_t>(b) % col_spans.size()];
    for (std::size_t c = 0; c < chunks.size(); ++c)
      visit(ScheduleStep{b, rows, cols, g, groups[static_cast<std::size_t>(g)], static_cast<Index>(c), chunks[c],
                         c == 0, c + 1 == chunks.size()});
  };
  const Index n_groups = static_cast<Index>(groups.size());
  if (plan.order == LoopOrder::BlockOuter) {
    for (Index b = 0; b < blocks; ++b)
      for (Index g = 0; g < n_groups; ++g) run_block_group(b, g);
  } else {
    for (Index g = 0; g < n_groups; ++g)
      for (Index b = 0; b < blocks; ++b) run_block_group(b, g);
  }
}

}  // namespace mpna
