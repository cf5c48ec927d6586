#include "mpna/timing.hpp"

#include <algorithm>
#include <future>

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "mpna/planner.hpp"
#include "mpna/schedule.hpp"

namespace mpna {

const char* to_string(Bound bound) { return bound == Bound::ComputeBound ? "compute" : "memory"; }

const char* to_string(Architecture arch) { return arch == Architecture::Conventional ? "conventional" : "mpna"; }

double LayerTiming::utilization(const HardwareConfig& cfg) const {
  if (total_cycles == 0) return 0.0;
  return static_cast<double>(macs) / (static_cast<double>(total_cycles) * static_cast<double>(cfg.sa_rows * cfg.sa_cols * arrays));
}

namespace {

// Calls visit(TileIssue) for every weight tile in issue order.
template <typename Visitor>
void for_each_tile(const LayerDescriptor& layer, const DataflowPlan& plan, const HardwareConfig& cfg, bool dual,
                   int single_array, Visitor&& visit) {
  const Index K = cfg.sa_rows, L = cfg.sa_cols, PQ = layer.kernel_rows * layer.kernel_cols;
  const Index column_groups = ceil_div(layer.out_maps, L);
  for_each_step(layer, plan, [&](const ScheduleStep& s) {
    const Index T = s.rows.size * s.cols.size;
    const Index n_rt = ceil_div(s.channels.size * PQ, K);
    for (Index f0 = s.filters.begin; f0 < s.filters.end(); f0 += L) {
      // A (block, column group) pair always lands on the same array so its
      // partial sums meet in the same accumulator sub-units.
      const int array = dual ? static_cast<int>((s.block * column_groups + f0 / L) % 2) : single_array;
      for (Index rt = 0; rt < n_rt; ++rt) visit(TileIssue{T, array});
    }
  });
}

}  // namespace

std::vector<TileIssue> tile_schedule(const LayerDescriptor& layer, const DataflowPlan& plan,
                                     const HardwareConfig& cfg, bool dual, int single_array) {
  std::vector<TileIssue> tiles;
  for_each_tile(layer, plan, cfg, dual, single_array, [&tiles](const TileIssue& t) { tiles.push_back(t); });
  return tiles;
}

namespace {

struct ArrayLoad {
  std::int64_t stream = 0;
  std::int64_t preload = 0;
  std::int64_t fill = 0;
  Index tiles = 0;

  std::int64_t total() const { return stream + preload + fill; }
};

// Cycles of one array over its tiles in issue order. With shadow registers
// the next tile's K-cycle preload overlaps the current tile's T streaming
// cycles; the first preload overlaps the layer's DRAM prologue.
struct ArrayAccumulator {
  ArrayLoad load;
  Index prev_T = -1;
  bool preload = true;

  void add(Index T, const HardwareConfig& cfg) {
    load.stream += T;
    if (preload && prev_T >= 0) load.preload += std::max<Index>(0, cfg.sa_rows - prev_T);
    prev_T = T;
    ++load.tiles;
  }
  ArrayLoad finish(const HardwareConfig& cfg) const {
    ArrayLoad a = load;
    if (a.tiles > 0) a.fill = cfg.sa_rows + cfg.sa_cols - 1;
    return a;
  }
};

LayerTiming finish(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan,
                   const ArrayLoad& critical, Index tiles, Index arrays) {
  LayerTiming t;
  t.compute_cycles = critical.stream;
  t.weight_load_cycles = critical.preload;
  t.fill_drain_cycles = critical.fill;
  t.dram_transfer_cycles = cfg.dram_cycles(plan.traffic.dram_total() * cfg.bytes_per_element);
  t.total_cycles = std::max(t.compute_side(), t.dram_transfer_cycles);
  t.bound = t.dram_transfer_cycles > t.compute_side() ? Bound::MemoryBound : Bound::ComputeBound;
  t.arrays = arrays;
  t.tiles = tiles;
  t.macs = mac_count(layer);
  return t;
}

}  // namespace

LayerTiming time_sa_conv(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan) {
  ArrayAccumulator conv{{}, -1, true};
  for_each_tile(layer, plan, cfg, false, 0, [&](const TileIssue& t) { conv.add(t.vectors, cfg); });
  return finish(layer, cfg, plan, conv.finish(cfg), conv.load.tiles, 1);
}

LayerTiming time_sa_fc(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan) {
  ArrayAccumulator fc{{}, -1, false};
  for_each_tile(layer, plan, cfg, false, 1, [&](const TileIssue& t) { fc.add(t.vectors, cfg); });
  return finish(layer, cfg, plan, fc.finish(cfg), fc.load.tiles, 1);
}

LayerTiming time_dual_conv(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan) {
  ArrayAccumulator arrays[2] = {{{}, -1, true}, {{}, -1, false}};
  for_each_tile(layer, plan, cfg, true, 0, [&](const TileIssue& t) { arrays[t.array].add(t.vectors, cfg); });
  const ArrayLoad conv = arrays[0].finish(cfg), fc = arrays[1].finish(cfg);
  return finish(layer, cfg, plan, conv.total() >= fc.total() ? conv : fc, conv.tiles + fc.tiles, 2);
}

LayerTiming time_layer(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan,
                       Architecture arch) {
  if (!layer.has_weights()) throw NotApplicable("no timing for pooling layer " + layer.name);
  if (arch == Architecture::Conventional) return time_sa_conv(layer, cfg, plan);
  return layer.kind == LayerKind::FullyConnected ? time_sa_fc(layer, cfg, plan) : time_dual_conv(layer, cfg, plan);
}

NetworkTiming time_network(const NetworkDescriptor& net, const HardwareConfig& cfg,
                           const std::vector<std::optional<DataflowPlan>>& plans, Architecture arch) {
  if (plans.size() != net.layers.size()) throw InvalidConfig("time_network needs one plan slot per layer");
  NetworkTiming out;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    if (!l.has_weights() || !plans[k]) {
      out.layers.emplace_back();
      continue;
    }
    LayerTiming t = time_layer(l, cfg, *plans[k], arch);
    (l.kind == LayerKind::FullyConnected ? out.fc_cycles : out.conv_cycles) += t.total_cycles;
    out.layers.emplace_back(t);
  }
  return out;
}

std::vector<SpeedupRow> speedup_report(const NetworkDescriptor& net, const HardwareConfig& base,
                                       const std::vector<std::pair<Index, Index>>& sizes) {
  auto evaluate = [&net, &base](Index rows, Index cols) {
    const HardwareConfig cfg = base.with_array(rows, cols);
    const auto plans = plan_network(net, cfg);
    SpeedupRow r;
    r.rows = rows;
    r.cols = cols;
    r.conventional = time_network(net, cfg, plans, Architecture::Conventional);
    r.mpna = time_network(net, cfg, plans, Architecture::Mpna);
    return r;
  };

  std::vector<std::future<SpeedupRow>> jobs;
  jobs.reserve(sizes.size() + 1);
  jobs.push_back(std::async(std::launch::async, evaluate, Index{1}, Index{1}));
  for (const auto& [r, c] : sizes) jobs.push_back(std::async(std::launch::async, evaluate, r, c));

  const SpeedupRow ref = jobs.front().get();
  auto ratio = [](std::int64_t a, std::int64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  std::vector<SpeedupRow> rows;
  for (std::size_t k = 1; k < jobs.size(); ++k) {
    SpeedupRow r = jobs[k].get();
    r.conventional_conv_speedup = ratio(ref.conventional.conv_cycles, r.conventional.conv_cycles);
    r.conventional_fc_speedup = ratio(ref.conventional.fc_cycles, r.conventional.fc_cycles);
    r.mpna_conv_speedup = ratio(ref.mpna.conv_cycles, r.mpna.conv_cycles);
    r.mpna_fc_speedup = ratio(ref.mpna.fc_cycles, r.mpna.fc_cycles);
    r.mpna_vs_conventional = ratio(r.conventional.total_cycles(), r.mpna.total_cycles());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mpna
