#include <gtest/gtest.h>

#include <random>

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "oracles.hpp"

using namespace mpna;

namespace {

// Published MACs and weights per layer type.
struct TableRow {
  const char* net;
  double conv_macs, fc_macs, conv_weights, fc_weights;
};

const TableRow kTable[] = {
    {"alexnet", 1.07e9, 58.62e6, 3.74e6, 58.63e6},
    {"vgg16", 15.34e9, 123.63e6, 14.71e6, 123.64e6},
};

double rel(double a, double b) { return std::abs(a - b) / b; }

}  // namespace

TEST(Model, PublishedTotalsWithinOnePercent) {
  for (const auto& row : kTable) {
    const auto t = network_totals(builtin_network(row.net));
    EXPECT_LT(rel(static_cast<double>(t.conv_macs), row.conv_macs), 0.01) << row.net;
    EXPECT_LT(rel(static_cast<double>(t.fc_macs), row.fc_macs), 0.01) << row.net;
    EXPECT_LT(rel(static_cast<double>(t.conv_weights), row.conv_weights), 0.01) << row.net;
    EXPECT_LT(rel(static_cast<double>(t.fc_weights), row.fc_weights), 0.01) << row.net;
  }
}

TEST(Model, MacCountMatchesLoopNest) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const auto l = oracle::random_conv(rng, 12, 5);
    EXPECT_EQ(mac_count(l), oracle::count_macs(l));
    const auto fc = LayerDescriptor::fully_connected("fc", l.in_maps * 3, l.out_maps);
    EXPECT_EQ(mac_count(fc), oracle::count_macs(fc));
  }
}

TEST(Model, ReuseIdentitiesOnBuiltinLayers) {
  for (const auto& net : builtin_networks())
    for (const auto& l : net.layers) {
      if (!l.has_weights()) continue;
      const auto r = reuse_profile(l);
      EXPECT_EQ(r.weight_reuse * weight_count(l), mac_count(l)) << l.name;
      EXPECT_EQ(r.output_act_reuse * l.out_maps * l.out_rows * l.out_cols, mac_count(l)) << l.name;
      if (l.kind == LayerKind::FullyConnected) {
        EXPECT_EQ(r.weight_reuse, 1) << l.name;
      }
    }
}

TEST(Model, Conv3InputReuseMatchesBruteForce) {
  const auto net = builtin_network("alexnet");
  const auto& conv3 = net.layers[2];
  ASSERT_EQ(conv3.name, "conv3");
  EXPECT_EQ(reuse_profile(conv3).input_act_reuse, oracle::max_input_reuse(conv3));
  EXPECT_EQ(reuse_profile(conv3).input_act_reuse, 384 * 9);
  EXPECT_EQ(reuse_profile(conv3).weight_reuse, 169);
}

TEST(Model, InputReuseIsInteriorMaximum) {
  // Holds whenever an interior activation exists, i.e. the map is large
  // enough that some position is covered by every kernel offset.
  const auto net = builtin_network("vgg16");
  for (const auto& l : net.layers)
    if (l.kind == LayerKind::Conv) {
      EXPECT_EQ(reuse_profile(l).input_act_reuse, oracle::max_input_reuse(l)) << l.name;
    }
}

TEST(Model, PoolingLayersHaveNoMacs) {
  const auto pool = LayerDescriptor::max_pool("pool", 4, 3, 3, 2);
  EXPECT_THROW(mac_count(pool), NotApplicable);
  EXPECT_THROW(weight_count(pool), NotApplicable);
  EXPECT_THROW(reuse_profile(pool), NotApplicable);
}

TEST(Model, BuiltinLookup) {
  EXPECT_EQ(builtin_network("AlexNet").name, "alexnet");
  EXPECT_EQ(builtin_network("VGG-16").name, "vgg16");
  EXPECT_THROW(builtin_network("resnet"), InvalidConfig);
  for (const auto& net : builtin_networks()) EXPECT_NO_THROW(net.validate());
}
