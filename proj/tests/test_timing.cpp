#include <gtest/gtest.h>

#include <random>

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "mpna/planner.hpp"
#include "mpna/timing.hpp"
#include "oracles.hpp"

using namespace mpna;

namespace {

HardwareConfig generous(Index k, Index l) {
  HardwareConfig cfg = HardwareConfig::defaults().with_array(k, l);
  cfg.data_buffer_bytes = 1 << 24;
  cfg.weight_buffer_bytes = 1 << 24;
  cfg.spm_entries = 1 << 16;
  cfg.dram_bandwidth_bytes_per_s = cfg.clock_hz * 1024;
  return cfg;
}

std::vector<Index> vectors_on(const std::vector<TileIssue>& tiles, int array) {
  std::vector<Index> v;
  for (const auto& t : tiles)
    if (t.array == array) v.push_back(t.vectors);
  return v;
}

}  // namespace

TEST(Timing, SingleTileOnUnitArray) {
  // One 1x1 weight, 100 output pixels: T streaming cycles plus K + L - 1.
  const auto l = LayerDescriptor::conv("c", 1, 1, 10, 1, 1, 0, Activation::none());
  const HardwareConfig cfg = HardwareConfig::defaults().with_array(1, 1);
  const auto t = time_sa_conv(l, cfg, plan(l, cfg));
  EXPECT_EQ(t.compute_cycles, 100);
  EXPECT_EQ(t.weight_load_cycles, 0);
  EXPECT_EQ(t.fill_drain_cycles, 1);
  EXPECT_EQ(t.total_cycles, 101);
  EXPECT_EQ(t.bound, Bound::ComputeBound);
}

TEST(Timing, ExposedPreloadOnShortTiles) {
  // FC on SA-CONV: one vector per tile, so each following tile waits K - 1.
  const auto l = LayerDescriptor::fully_connected("f", 64, 64, Activation::none());
  const HardwareConfig cfg = generous(8, 8);
  const DataflowPlan p = plan(l, cfg);
  const auto conv = time_sa_conv(l, cfg, p);
  const auto fc = time_sa_fc(l, cfg, p);
  EXPECT_EQ(conv.tiles, 64);
  EXPECT_EQ(conv.compute_cycles, 64);
  EXPECT_EQ(conv.weight_load_cycles, 63 * 7);
  EXPECT_EQ(fc.weight_load_cycles, 0);
  EXPECT_EQ(fc.total_cycles, 64 + 15);
}

TEST(Timing, AlexNetFc6IsMemoryBound) {
  const auto net = builtin_network("alexnet");
  const HardwareConfig cfg;
  const auto plans = plan_network(net, cfg);
  const auto& fc6 = net.layers[5];
  ASSERT_EQ(fc6.name, "fc6");
  // 37,748,736 weight bytes at 12.8 GB/s and 280 MHz.
  const auto t = time_layer(fc6, cfg, *plans[5], Architecture::Mpna);
  EXPECT_EQ(t.dram_transfer_cycles, 825754);
  EXPECT_EQ(t.bound, Bound::MemoryBound);
  EXPECT_EQ(t.total_cycles, 825754);

  HardwareConfig fast = cfg;
  fast.dram_bandwidth_bytes_per_s *= 2;
  const auto t2 = time_layer(fc6, fast, *plans[5], Architecture::Mpna);
  EXPECT_EQ(t2.dram_transfer_cycles, 412877);
  EXPECT_EQ(t2.compute_side(), t.compute_side());
}

TEST(Timing, MatchesEventReplay) {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<Index> arr(1, 8);
  int checked = 0;
  for (int k = 0; k < 100 && checked < 50; ++k) {
    const HardwareConfig cfg = HardwareConfig::defaults().with_array(arr(rng), arr(rng));
    const auto l = oracle::random_conv(rng, 16, 3);
    DataflowPlan p;
    try {
      p = plan_with_case(l, cfg, 4, {true, true});
    } catch (const PlanInfeasible&) {
      continue;
    }
    const Index K = cfg.sa_rows, L = cfg.sa_cols;
    const auto single = tile_schedule(l, p, cfg, false);
    EXPECT_EQ(time_sa_conv(l, cfg, p).compute_side(), oracle::replay(vectors_on(single, 0), K, L, true));
    EXPECT_EQ(time_sa_fc(l, cfg, p).compute_side(), oracle::replay(vectors_on(single, 0), K, L, false));
    const auto dual = tile_schedule(l, p, cfg, true);
    const auto a0 = oracle::replay(vectors_on(dual, 0), K, L, true);
    const auto a1 = oracle::replay(vectors_on(dual, 1), K, L, false);
    EXPECT_EQ(time_dual_conv(l, cfg, p).compute_side(), std::max(a0, a1));
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(Timing, AlexNetConv2MatchesEventReplay) {
  const auto net = builtin_network("alexnet");
  const HardwareConfig cfg;
  const auto plans = plan_network(net, cfg);
  const auto& conv2 = net.layers[1];
  const DataflowPlan& p = *plans[1];
  const auto single = tile_schedule(conv2, p, cfg, false);
  EXPECT_EQ(time_sa_conv(conv2, cfg, p).compute_side(), oracle::replay(vectors_on(single, 0), 8, 8, true));
  const auto dual = tile_schedule(conv2, p, cfg, true);
  EXPECT_EQ(time_dual_conv(conv2, cfg, p).compute_side(),
            std::max(oracle::replay(vectors_on(dual, 0), 8, 8, true), oracle::replay(vectors_on(dual, 1), 8, 8, false)));
}

TEST(Timing, WorkConservationOnUnitArray) {
  std::mt19937_64 rng(59);
  const HardwareConfig cfg = generous(1, 1);
  for (int k = 0; k < 30; ++k) {
    const auto l = oracle::random_conv(rng, 12, 3);
    const DataflowPlan p = plan_with_case(l, cfg, 4, {true, true});
    EXPECT_EQ(time_sa_conv(l, cfg, p).compute_cycles, mac_count(l));
    const auto dual = time_dual_conv(l, cfg, p);
    Index streamed = 0;
    for (const auto& t : tile_schedule(l, p, cfg, true)) streamed += t.vectors;
    EXPECT_EQ(streamed, mac_count(l));
    EXPECT_GE(2 * dual.compute_cycles, mac_count(l));
  }
}

TEST(Timing, UtilizationAtMostOne) {
  const auto net = builtin_network("alexnet");
  for (Index s : {2, 4, 8}) {
    const HardwareConfig cfg = HardwareConfig::defaults().with_array(s, s);
    const auto plans = plan_network(net, cfg);
    for (auto arch : {Architecture::Conventional, Architecture::Mpna}) {
      const auto t = time_network(net, cfg, plans, arch);
      for (const auto& lt : t.layers) {
        if (!lt) continue;
        EXPECT_LE(lt->utilization(cfg), 1.0);
        EXPECT_GE(lt->total_cycles, lt->compute_side());
        EXPECT_GE(lt->total_cycles, lt->dram_transfer_cycles);
      }
    }
  }
}

TEST(Timing, LargerArraysNeverSlowerOnDivisibleLayers) {
  // Every dimension a multiple of 8 and ample buffers, so tiles divide
  // evenly at every array size. FC layers need a few tiles per array before
  // the larger K + L - 1 fill/drain is paid back.
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<Index> d(1, 4);
  for (int k = 0; k < 20; ++k) {
    const Index kernel = std::uniform_int_distribution<Index>(1, 3)(rng);
    const auto conv = LayerDescriptor::conv("c", 8 * d(rng), 8 * d(rng), 4 * d(rng), kernel, 1, 0, Activation::none());
    const auto fc = LayerDescriptor::fully_connected("f", 32 * d(rng), 32 * d(rng), Activation::none());
    for (const auto& l : {conv, fc}) {
      for (auto arch : {Architecture::Conventional, Architecture::Mpna}) {
        std::int64_t prev = std::numeric_limits<std::int64_t>::max();
        for (Index s : {1, 2, 4, 8}) {
          const HardwareConfig cfg = generous(s, s);
          const auto t = time_layer(l, cfg, plan(l, cfg), arch);
          EXPECT_LE(t.total_cycles, prev) << l.name << " " << to_string(arch) << " " << s;
          prev = t.total_cycles;
        }
      }
    }
  }
}

TEST(Timing, SpeedupReportShape) {
  const auto rows = speedup_report(builtin_network("alexnet"), HardwareConfig{}, {{8, 8}, {2, 2}, {4, 4}});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rows, 8);
  EXPECT_EQ(rows[1].rows, 2);
  EXPECT_LT(rows[1].conventional_conv_speedup, rows[2].conventional_conv_speedup);
  EXPECT_LT(rows[2].conventional_conv_speedup, rows[0].conventional_conv_speedup);
  for (const auto& r : rows) EXPECT_GE(r.mpna_vs_conventional, 1.0);
}

TEST(Timing, PoolingLayersAreNotTimed) {
  const auto pool = LayerDescriptor::max_pool("p", 4, 3, 3, 2);
  EXPECT_THROW(time_layer(pool, HardwareConfig{}, DataflowPlan{}, Architecture::Mpna), NotApplicable);
}
