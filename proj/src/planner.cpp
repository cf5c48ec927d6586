#include "mpna/planner.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "mpna/schedule.hpp"

namespace mpna {

namespace {

void require_weights(const LayerDescriptor& layer) {
  if (!layer.has_weights()) throw NotApplicable("no dataflow plan for pooling layer " + layer.name);
}

// Clipped input-window statistics along one axis for a given block size.
struct AxisStats {
  Index blocks = 0;
  Index window_sum = 0;
  Index window_max = 0;
};

AxisStats axis_stats(Index out_extent, Index tile, Index stride, Index kernel, Index pad, Index in_extent) {
  AxisStats s;
  for (const Span& b : split(out_extent, tile)) {
    const Index h = input_window(b, stride, kernel, pad, in_extent).size;
    ++s.blocks;
    s.window_sum += h;
    s.window_max = std::max(s.window_max, h);
  }
  return s;
}

struct LayerSizes {
  Index in = 0;   // stored input elements
  Index out = 0;  // output elements after pooling
  Index weights = 0;
  Index per_filter = 0;  // I*P*Q
};

LayerSizes sizes_of(const LayerDescriptor& l) {
  return {l.input_volume(), l.output_volume(), weight_count(l), l.in_maps * l.kernel_rows * l.kernel_cols};
}

Index column_groups(Index J, Index Tj, Index L) {
  Index total = 0;
  for (const Span& g : split(J, Tj)) total += ceil_div(g.size, L);
  return total;
}

Index row_tiles(Index I, Index Ti, Index PQ, Index K) {
  Index total = 0;
  for (const Span& c : split(I, Ti)) total += ceil_div(c.size * PQ, K);
  return total;
}

Traffic traffic_core(const LayerDescriptor& l, const HardwareConfig& cfg, const DataflowPlan& p, const AxisStats& rows,
                     const AxisStats& cols) {
  const LayerSizes sz = sizes_of(l);
  const Index PQ = l.kernel_rows * l.kernel_cols;
  const Index nb = rows.blocks * cols.blocks;
  const Index gj = ceil_div(l.out_maps, p.tiles.filters);
  const Index window_area = rows.window_sum * cols.window_sum;

  Traffic t;
  const bool weights_once =
      p.weights_pinned || nb == 1 || (p.order == LoopOrder::FilterOuter && p.group_weights_resident);
  t.dram_weights = weights_once ? sz.weights : sz.weights * nb;
  if (p.boundary.input_in_dram) {
    switch (p.input) {
      case InputResidency::Whole:
        t.dram_in_act = sz.in;
        break;
      case InputResidency::PerBlock:
        t.dram_in_act = l.in_maps * window_area;
        break;
      case InputResidency::Streamed:
        t.dram_in_act = gj * l.in_maps * window_area;
        break;
    }
  }
  t.dram_out_act = p.output_resident ? 0 : sz.out;

  const Index MN = l.out_rows * l.out_cols;
  const Index cg = column_groups(l.out_maps, p.tiles.filters, cfg.sa_cols);
  const Index rt = row_tiles(l.in_maps, p.tiles.channels, PQ, cfg.sa_rows);
  t.onchip.weight_buffer = t.dram_weights + sz.weights * nb;
  t.onchip.data_buffer = t.dram_in_act + MN * sz.per_filter * cg + sz.out + t.dram_out_act;
  t.onchip.spm = 2 * MN * l.out_maps * rt + MN * l.out_maps;
  return t;
}

Footprint footprint_core(const LayerDescriptor& l, const HardwareConfig& cfg, const DataflowPlan& p,
                         const AxisStats& rows, const AxisStats& cols) {
  const LayerSizes sz = sizes_of(l);
  const Index PQ = l.kernel_rows * l.kernel_cols;
  const Index tj = std::min(p.tiles.filters, l.out_maps);
  const Index ti = std::min(p.tiles.channels, l.in_maps);
  Footprint f;
  f.weight_buffer = p.weights_pinned ? sz.weights : p.group_weights_resident ? tj * sz.per_filter : tj * ti * PQ;
  const Index window = rows.window_max * cols.window_max;
  switch (p.input) {
    case InputResidency::Whole:
      f.data_buffer = sz.in;
      break;
    case InputResidency::PerBlock:
      f.data_buffer = l.in_maps * window;
      break;
    case InputResidency::Streamed:
      f.data_buffer = ti * window;
      break;
  }
  if (p.output_resident) f.data_buffer += sz.out;
  f.spm_per_bank = ceil_div(tj, cfg.sa_cols) * p.tiles.block_rows * p.tiles.block_cols;
  return f;
}

bool fits(const Footprint& f, const HardwareConfig& cfg) {
  return f.data_buffer <= cfg.data_buffer_elements() && f.weight_buffer <= cfg.weight_buffer_elements() &&
         f.spm_per_bank <= cfg.spm_entries;
}

// Strict preference between two feasible plans with known traffic.
bool better(const DataflowPlan& a, const DataflowPlan& b, const LayerDescriptor& l) {
  if (a.traffic.dram_total() != b.traffic.dram_total()) return a.traffic.dram_total() < b.traffic.dram_total();
  if (a.traffic.onchip.total() != b.traffic.onchip.total())
    return a.traffic.onchip.total() < b.traffic.onchip.total();
  const Index blocks_a = ceil_div(l.out_rows, a.tiles.block_rows) * ceil_div(l.out_cols, a.tiles.block_cols);
  const Index blocks_b = ceil_div(l.out_rows, b.tiles.block_rows) * ceil_div(l.out_cols, b.tiles.block_cols);
  return blocks_a < blocks_b;
}

std::vector<Index> filter_tile_candidates(Index J, Index L, int case_id, bool double_group) {
  const Index units = ceil_div(J, L);
  if (case_id == 2) return {double_group ? 2 * L : L};
  std::vector<Index> out;
  for (Index k = 1; k <= units; ++k) {
    const Index tj = L * ceil_div(units, k);
    if (out.empty() || out.back() != tj) out.push_back(tj);
  }
  return out;
}

std::optional<DataflowPlan> search(const LayerDescriptor& l, const HardwareConfig& cfg, int case_id,
                                   const LayerBoundary& boundary, bool double_group) {
  const LayerSizes sz = sizes_of(l);
  const Index M = l.out_rows, N = l.out_cols, L = cfg.sa_cols;
  const Index wb = cfg.weight_buffer_elements();

  std::vector<AxisStats> row_stats(static_cast<std::size_t>(M + 1)), col_stats(static_cast<std::size_t>(N + 1));
  for (Index t = 1; t <= M; ++t)
    row_stats[static_cast<std::size_t>(t)] = axis_stats(M, t, l.stride, l.kernel_rows, l.pad, l.in_rows());
  for (Index t = 1; t <= N; ++t)
    col_stats[static_cast<std::size_t>(t)] = axis_stats(N, t, l.stride, l.kernel_cols, l.pad, l.in_cols());

  const Index ti_min = min_channel_tile(l, cfg);
  std::vector<Index> ti_candidates{ti_min};
  if (ti_min != l.in_maps) ti_candidates.push_back(l.in_maps);

  std::vector<bool> out_options;
  if (boundary.output_to_dram || case_id == 3)
    out_options = {false};
  else if (case_id == 4)
    out_options = {true, false};
  else
    out_options = {true};

  std::vector<InputResidency> in_options{InputResidency::Whole};
  if (case_id == 4 && boundary.input_in_dram) in_options = {InputResidency::Whole, InputResidency::PerBlock, InputResidency::Streamed};

  std::vector<LoopOrder> orders{LoopOrder::BlockOuter, LoopOrder::FilterOuter};
  if (case_id == 2) orders = {LoopOrder::FilterOuter};

  const std::vector<Index> tj_candidates = filter_tile_candidates(l.out_maps, L, case_id, double_group);
  std::optional<DataflowPlan> best;
  const Index tm_lo = case_id == 1 ? M : 1;
  const Index tn_lo = case_id == 1 ? N : 1;
  for (Index tm = M; tm >= tm_lo; --tm) {
    for (Index tn = N; tn >= tn_lo; --tn) {
      const AxisStats& rs = row_stats[static_cast<std::size_t>(tm)];
      const AxisStats& cs = col_stats[static_cast<std::size_t>(tn)];
      for (Index tj : tj_candidates) {
        const Index tj_eff = std::min(tj, l.out_maps);
        if (ceil_div(tj_eff, L) * tm * tn > cfg.spm_entries) continue;
        for (Index ti : ti_candidates) {
          for (LoopOrder order : orders) {
            DataflowPlan p;
            p.case_id = case_id;
            p.tiles = {tj, ti, tm, tn};
            p.order = order;
            p.boundary = boundary;
            p.weights_pinned = sz.weights <= wb;
            p.group_weights_resident = order == LoopOrder::FilterOuter && tj_eff * sz.per_filter <= wb;
            if (case_id == 2 && !p.group_weights_resident) continue;
            for (bool out_res : out_options) {
              p.output_resident = out_res;
              for (InputResidency in : in_options) {
                if (in == InputResidency::PerBlock && order != LoopOrder::BlockOuter) continue;
                p.input = in;
                if (!fits(footprint_core(l, cfg, p, rs, cs), cfg)) continue;
                p.traffic = traffic_core(l, cfg, p, rs, cs);
                if (!best || better(p, *best, l)) best = p;
              }
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

Index min_channel_tile(const LayerDescriptor& layer, const HardwareConfig& cfg) {
  const Index PQ = layer.kernel_rows * layer.kernel_cols;
  return std::min(layer.in_maps, cfg.sa_rows / std::gcd(cfg.sa_rows, PQ));
}

int classify(const LayerDescriptor& layer, const HardwareConfig& cfg) {
  require_weights(layer);
  const LayerSizes sz = sizes_of(layer);
  const Index bpe = cfg.bytes_per_element;
  const bool both_fit = (sz.in + sz.out) * bpe <= cfg.data_buffer_bytes;
  if (both_fit && layer.out_rows * layer.out_cols <= cfg.spm_entries) return 1;
  if (both_fit && cfg.sa_cols * sz.per_filter * bpe <= cfg.weight_buffer_bytes) return 2;
  if (!both_fit && sz.in * bpe <= cfg.data_buffer_bytes) return 3;
  return 4;
}

LayerBoundary standalone_boundary(int case_id) { return {case_id == 4, case_id >= 3}; }

DataflowPlan plan(const LayerDescriptor& layer, const HardwareConfig& cfg) {
  const int c = classify(layer, cfg);
  return plan_with_case(layer, cfg, c, standalone_boundary(c));
}

DataflowPlan plan(const LayerDescriptor& layer, const HardwareConfig& cfg, const LayerBoundary& boundary) {
  return plan_with_case(layer, cfg, classify(layer, cfg), boundary);
}

DataflowPlan plan_with_case(const LayerDescriptor& layer, const HardwareConfig& cfg, int case_id,
                            const LayerBoundary& boundary) {
  require_weights(layer);
  layer.validate();
  cfg.validate();
  if (case_id < 1 || case_id > 4) throw InvalidConfig("dataflow case must be 1..4");
  std::optional<DataflowPlan> best;
  if (case_id == 2 && 2 * cfg.sa_cols <= round_up(layer.out_maps, cfg.sa_cols))
    best = search(layer, cfg, case_id, boundary, true);
  if (!best) best = search(layer, cfg, case_id, boundary, false);
  if (!best)
    throw PlanInfeasible("layer " + layer.name + ": no tiling satisfies case " + std::to_string(case_id) +
                         " within the buffer and SPM capacities");
  return *best;
}

std::vector<std::optional<DataflowPlan>> plan_network(const NetworkDescriptor& net, const HardwareConfig& cfg) {
  net.validate();
  std::vector<std::optional<DataflowPlan>> plans;
  bool input_on_chip = false;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    if (!l.has_weights()) {
      plans.emplace_back();
      input_on_chip = false;
      continue;
    }
    const int c = classify(l, cfg);
    const bool last = k + 1 == net.layers.size();
    bool keep = false;
    if (!last && net.layers[k + 1].has_weights() && (c == 1 || c == 2)) keep = classify(net.layers[k + 1], cfg) <= 3;
    const LayerBoundary boundary{!input_on_chip, !keep};
    DataflowPlan p = plan_with_case(l, cfg, c, boundary);
    input_on_chip = p.output_resident;
    plans.emplace_back(std::move(p));
  }
  return plans;
}

Traffic evaluate_traffic(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan) {
  require_weights(layer);
  return traffic_core(
      layer, cfg, plan,
      axis_stats(layer.out_rows, plan.tiles.block_rows, layer.stride, layer.kernel_rows, layer.pad, layer.in_rows()),
      axis_stats(layer.out_cols, plan.tiles.block_cols, layer.stride, layer.kernel_cols, layer.pad, layer.in_cols()));
}

Footprint footprint(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan) {
  require_weights(layer);
  return footprint_core(
      layer, cfg, plan,
      axis_stats(layer.out_rows, plan.tiles.block_rows, layer.stride, layer.kernel_rows, layer.pad, layer.in_rows()),
      axis_stats(layer.out_cols, plan.tiles.block_cols, layer.stride, layer.kernel_cols, layer.pad, layer.in_cols()));
}

Traffic naive_traffic(const LayerDescriptor& layer) {
  Traffic t;
  t.dram_in_act = mac_count(layer);
  t.dram_weights = mac_count(layer);
  t.dram_out_act = layer.raw_output_volume();
  return t;
}

std::vector<std::string> validate_plan(const LayerDescriptor& l, const HardwareConfig& cfg, const DataflowPlan& p) {
  std::vector<std::string> errs;
  auto err = [&errs](const std::string& s) { errs.push_back(s); };
  const Index K = cfg.sa_rows, L = cfg.sa_cols, PQ = l.kernel_rows * l.kernel_cols;
  const TileShape& t = p.tiles;

  if (t.filters < L || t.filters % L != 0) err("filter tile " + std::to_string(t.filters) + " is not a multiple of L");
  if (t.filters > round_up(l.out_maps, L)) err("filter tile larger than the rounded filter count");
  if (t.channels < 1 || t.channels > l.in_maps) err("channel tile out of range");
  else if ((t.channels * PQ) % K != 0 && t.channels != l.in_maps)
    err("per-filter weight chunk " + std::to_string(t.channels * PQ) + " is not a multiple of K");
  if (t.block_rows < 1 || t.block_rows > l.out_rows || t.block_cols < 1 || t.block_cols > l.out_cols)
    err("output block out of range");
  if (!errs.empty()) return errs;

  if (p.input == InputResidency::PerBlock && p.order != LoopOrder::BlockOuter)
    err("per-block input residency needs the block-outer order");
  if (p.group_weights_resident && p.order != LoopOrder::FilterOuter)
    err("group weight residency needs the filter-outer order");
  if (!p.boundary.input_in_dram && p.input != InputResidency::Whole)
    err("input held on chip must be resident as a whole");
  if (p.boundary.output_to_dram && p.output_resident) err("output must reach DRAM but is kept resident");

  const auto row_spans = split(l.out_rows, t.block_rows);
  const auto col_spans = split(l.out_cols, t.block_cols);
  const auto groups = split(l.out_maps, t.filters);
  const auto chunks = split(l.in_maps, t.channels);
  const Index blocks = static_cast<Index>(row_spans.size() * col_spans.size());

  switch (p.case_id) {
    case 1:
      if (blocks != 1) err("case 1 needs a single output block");
      if (p.input != InputResidency::Whole) err("case 1 needs the whole input resident");
      if (p.output_resident == p.boundary.output_to_dram) err("case 1 keeps the output on chip unless it must leave");
      break;
    case 2:
      if (p.order != LoopOrder::FilterOuter || !p.group_weights_resident)
        err("case 2 needs filter groups outermost with their filters resident");
      if (t.filters != L && t.filters != 2 * L) err("case 2 groups must hold L or 2L filters");
      if (p.input != InputResidency::Whole) err("case 2 needs the whole input resident");
      if (p.output_resident == p.boundary.output_to_dram) err("case 2 keeps the output on chip unless it must leave");
      break;
    case 3:
      if (p.input != InputResidency::Whole) err("case 3 needs the whole input resident");
      if (p.output_resident) err("case 3 drains the output to DRAM");
      break;
    case 4:
      break;
    default:
      err("case id out of range");
  }

  // Walk the schedule, tracking what each buffer holds.
  const Index IF = l.input_volume(), OF = l.output_volume(), W = weight_count(l);
  Index w_loaded = 0, in_loaded = 0, w_peak = 0, d_peak = 0;
  std::set<std::pair<Index, Index>> w_resident;  // (group, chunk)
  Index w_held = 0;
  Index current_block = -1, current_group = -1;
  Index in_held = 0;
  if (p.input == InputResidency::Whole) {
    in_held = IF;
    if (p.boundary.input_in_dram) in_loaded += IF;
  }
  std::vector<std::vector<bool>> spm_used(static_cast<std::size_t>(L));
  bool spm_overflow = false, spm_collision = false;

  auto visit = [&](Index b, Index g) {
    const Span rows = row_spans[static_cast<std::size_t>(b) / col_spans.size()];
    const Span cols = col_spans[static_cast<std::size_t>(b) % col_spans.size()];
    const Span filt = groups[static_cast<std::size_t>(g)];
    const Span wr = input_window(rows, l.stride, l.kernel_rows, l.pad, l.in_rows());
    const Span wc = input_window(cols, l.stride, l.kernel_cols, l.pad, l.in_cols());
    const Index window = wr.size * wc.size;
    if (p.input == InputResidency::PerBlock && b != current_block) {
      in_held = l.in_maps * window;
      if (p.boundary.input_in_dram) in_loaded += in_held;
    }
    if (!p.weights_pinned && p.group_weights_resident && g != current_group) {
      w_resident.clear();
      w_held = 0;
    }
    current_block = b;
    current_group = g;

    // Accumulator addresses of this (block, group).
    for (auto& bank : spm_used) bank.assign(static_cast<std::size_t>(cfg.spm_entries), false);
    for (Index f = 0; f < filt.size && !spm_overflow; ++f) {
      const SpmSlot slot = p.spm_slot(f, L);
      for (Index px = 0; px < rows.size * cols.size; ++px) {
        const Index a = slot.base_address + px;
        if (slot.bank >= L || a >= cfg.spm_entries) {
          spm_overflow = true;
          break;
        }
        auto&& used = spm_used[static_cast<std::size_t>(slot.bank)][static_cast<std::size_t>(a)];
        if (used) spm_collision = true;
        used = true;
      }
    }

    for (std::size_t c = 0; c < chunks.size(); ++c) {
      const Span ch = chunks[c];
      const Index tile = filt.size * ch.size * PQ;
      const bool keep = p.weights_pinned || p.group_weights_resident;
      if (!keep) {
        w_resident.clear();
        w_held = 0;
      }
      if (w_resident.insert({g, static_cast<Index>(c)}).second) {
        w_loaded += tile;
        w_held += tile;
      }
      if (p.input == InputResidency::Streamed) {
        in_held = ch.size * window;
        if (p.boundary.input_in_dram) in_loaded += in_held;
      }
      w_peak = std::max(w_peak, w_held);
      d_peak = std::max(d_peak, in_held + (p.output_resident ? OF : 0));
    }
  };
  const Index n_groups = static_cast<Index>(groups.size());
  if (p.order == LoopOrder::BlockOuter) {
    for (Index b = 0; b < blocks; ++b)
      for (Index g = 0; g < n_groups; ++g) visit(b, g);
  } else {
    for (Index g = 0; g < n_groups; ++g)
      for (Index b = 0; b < blocks; ++b) visit(b, g);
  }

  if (w_peak > cfg.weight_buffer_elements())
    err("weight buffer holds " + std::to_string(w_peak) + " > " + std::to_string(cfg.weight_buffer_elements()));
  if (d_peak > cfg.data_buffer_elements())
    err("data buffer holds " + std::to_string(d_peak) + " > " + std::to_string(cfg.data_buffer_elements()));
  if (spm_overflow) err("SPM address beyond " + std::to_string(cfg.spm_entries) + " entries");
  if (spm_collision) err("two outputs share an SPM address");
  if (p.weights_pinned && W > cfg.weight_buffer_elements()) err("pinned weights exceed the weight buffer");

  const Index out_written = p.output_resident ? 0 : OF;
  if (w_loaded != p.traffic.dram_weights)
    err("weight traffic " + std::to_string(p.traffic.dram_weights) + " but the schedule loads " +
        std::to_string(w_loaded));
  if (in_loaded != p.traffic.dram_in_act)
    err("input traffic " + std::to_string(p.traffic.dram_in_act) + " but the schedule loads " +
        std::to_string(in_loaded));
  if (out_written != p.traffic.dram_out_act)
    err("output traffic " + std::to_string(p.traffic.dram_out_act) + " but the schedule writes " +
        std::to_string(out_written));
  return errs;
}

std::string format_plan(const LayerDescriptor& layer, const DataflowPlan& p) {
  std::ostringstream os;
  os << "layer=" << layer.name << " case=" << p.case_id << " Tj=" << p.tiles.filters << " Ti=" << p.tiles.channels
     << " Tm=" << p.tiles.block_rows << " Tn=" << p.tiles.block_cols << " order=" << to_string(p.order)
     << " weights=" << (p.weights_pinned ? "pinned" : p.group_weights_resident ? "group" : "tile")
     << " input=" << to_string(p.input) << " output=" << (p.output_resident ? "resident" : "dram")
     << " in_from_dram=" << p.boundary.input_in_dram << " dram_in=" << p.traffic.dram_in_act
     << " dram_out=" << p.traffic.dram_out_act << " dram_w=" << p.traffic.dram_weights
     << " dram_total=" << p.traffic.dram_total() << " data_buf=" << p.traffic.onchip.data_buffer
     << " weight_buf=" << p.traffic.onchip.weight_buffer << " spm=" << p.traffic.onchip.spm;
  return os.str();
}

}  // namespace mpna
