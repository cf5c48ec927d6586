#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mpna/accumulator.hpp"
#include "mpna/error.hpp"
#include "mpna/pooling.hpp"
#include "mpna/systolic.hpp"
#include "oracles.hpp"

using namespace mpna;

namespace {

Matrix<std::int8_t> random_matrix(Index r, Index c, std::mt19937_64& rng) {
  Matrix<std::int8_t> m(r, c);
  fill_random_int8(m, rng);
  return m;
}

}  // namespace

TEST(SaConv, RandomTilesMatchMatmul) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Index> arr(1, 8), vec(0, 16);
  for (int k = 0; k < 150; ++k) {
    const HardwareConfig cfg = HardwareConfig::defaults().with_array(arr(rng), arr(rng));
    const Index rows = std::uniform_int_distribution<Index>(1, cfg.sa_rows)(rng);
    const Index cols = std::uniform_int_distribution<Index>(1, cfg.sa_cols)(rng);
    const auto w = random_matrix(rows, cols, rng);
    const auto x = random_matrix(rows, vec(rng), rng);
    const ArrayRun run = run_sa_conv(x, w, cfg);
    EXPECT_EQ(run.outputs, oracle::matmul(x, w)) << "case " << k;
    EXPECT_EQ(run.preload_cycles, cfg.sa_rows);
    EXPECT_EQ(run.stream_cycles, x.cols() + cfg.sa_rows + cfg.sa_cols - 1);
  }
}

TEST(SaConv, IdentityAndOnes) {
  const HardwareConfig cfg;
  std::mt19937_64 rng(3);
  const auto x = random_matrix(8, 5, rng);
  const Matrix<std::int8_t> eye = Matrix<std::int8_t>::Identity(8, 8);
  EXPECT_EQ(run_sa_conv(x, eye, cfg).outputs, x.cast<Accum>());

  const Matrix<std::int8_t> ones = Matrix<std::int8_t>::Ones(8, 3);
  const auto out = run_sa_conv(x, ones, cfg).outputs;
  for (Index t = 0; t < 5; ++t)
    for (Index c = 0; c < 3; ++c) EXPECT_EQ(out(c, t), x.col(t).cast<Accum>().sum());
}

TEST(SaConv, WavefrontTiming) {
  const HardwareConfig cfg = HardwareConfig::defaults().with_array(4, 3);
  std::mt19937_64 rng(5);
  const ArrayRun run = run_sa_conv(random_matrix(4, 6, rng), random_matrix(4, 3, rng), cfg, true);
  // Vector 0 leaves column 0 after passing all K rows.
  EXPECT_EQ(run.first_output_cycle, cfg.sa_rows);
  // PE (r, c) fires for vector t at cycle t + r + c.
  for (const auto& rec : run.trace.cycles)
    for (const auto& f : rec.fired) {
      const Index t = rec.cycle - f.row - f.col;
      EXPECT_GE(t, 0);
      EXPECT_LT(t, 6);
      EXPECT_EQ(f.partial_out, f.partial_in + f.weight * f.activation);
    }
  std::ostringstream os;
  run.trace.write(os);
  EXPECT_EQ(os.str().substr(0, 10), "0 sa_conv ");
}

TEST(SaConv, RejectsOversizedTiles) {
  const HardwareConfig cfg = HardwareConfig::defaults().with_array(2, 2);
  std::mt19937_64 rng(1);
  EXPECT_THROW(run_sa_conv(random_matrix(3, 1, rng), random_matrix(3, 2, rng), cfg), ShapeMismatch);
  EXPECT_THROW(run_sa_conv(random_matrix(2, 1, rng), random_matrix(2, 3, rng), cfg), ShapeMismatch);
  EXPECT_THROW(run_sa_conv(random_matrix(1, 1, rng), random_matrix(2, 2, rng), cfg), ShapeMismatch);
}

TEST(SaFc, RandomMatvecStreams) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<Index> arr(1, 8), vec(1, 16);
  for (int k = 0; k < 120; ++k) {
    const HardwareConfig cfg = HardwareConfig::defaults().with_array(arr(rng), arr(rng));
    const Index rows = std::uniform_int_distribution<Index>(1, cfg.sa_rows)(rng);
    const Index cols = std::uniform_int_distribution<Index>(1, cfg.sa_cols)(rng);
    const Index T = vec(rng);
    const auto x = random_matrix(rows, T, rng);
    WeightStream ws;
    Matrix<Accum> expect(cols, T);
    for (Index t = 0; t < T; ++t) {
      ws.sets.push_back(random_matrix(rows, cols, rng));
      expect.col(t) = oracle::matmul(x.col(t), ws.sets.back());
    }
    EXPECT_EQ(run_sa_fc(x, ws, cfg).outputs, expect) << "case " << k;
  }
}

TEST(SaFc, TwoWeightSetsBackToBack) {
  const HardwareConfig cfg = HardwareConfig::defaults().with_array(2, 2);
  Matrix<std::int8_t> x(2, 2);
  x << 1, 3, 2, 4;
  WeightStream ws;
  Matrix<std::int8_t> a(2, 2), b(2, 2);
  a << 1, 0, 0, 1;
  b << 0, 1, 1, 0;
  ws.sets = {a, b};
  Matrix<Accum> expect(2, 2);
  expect << 1, 4, 2, 3;
  EXPECT_EQ(run_sa_fc(x, ws, cfg).outputs, expect);
}

TEST(SaFc, UnderrunWhenWeightsMissingOrLate) {
  const HardwareConfig cfg = HardwareConfig::defaults().with_array(2, 2);
  std::mt19937_64 rng(2);
  const auto x = random_matrix(2, 3, rng);
  WeightStream ws;
  ws.sets = {random_matrix(2, 2, rng), random_matrix(2, 2, rng)};
  EXPECT_THROW(run_sa_fc(x, ws, cfg), StreamUnderrun);
  ws.sets.push_back(random_matrix(2, 2, rng));
  EXPECT_NO_THROW(run_sa_fc(x, ws, cfg));
  ws.available_cycle = {0, 1, 5};
  EXPECT_THROW(run_sa_fc(x, ws, cfg), StreamUnderrun);
  ws.available_cycle = {0, 0, 2};
  EXPECT_NO_THROW(run_sa_fc(x, ws, cfg));
  ws.sets[1] = random_matrix(2, 1, rng);
  EXPECT_THROW(run_sa_fc(x, ws, cfg), ShapeMismatch);
}

TEST(Accumulator, AddressesAndDrain) {
  AccumulatorBank bank = AccumulatorBank::for_config(HardwareConfig{});
  EXPECT_EQ(bank.sub_units(), 16);
  EXPECT_EQ(bank.spm_entries(), 256);
  bank.accumulate(3, 10, 5);
  bank.accumulate(3, 10, -2);
  EXPECT_EQ(bank.value(3, 10), 3);
  EXPECT_EQ(bank.drain(3, 10), 3);
  EXPECT_EQ(bank.value(3, 10), 0);
  EXPECT_EQ(bank.accumulations(), 2);
  EXPECT_THROW(bank.accumulate(16, 0, 1), AddressOverflow);
  EXPECT_THROW(bank.accumulate(0, 256, 1), AddressOverflow);
  EXPECT_THROW(bank.accumulate(-1, 0, 1), AddressOverflow);
}

TEST(Accumulator, AlexNetConv3MapFitsOneSubUnit) {
  // A 13 x 13 output map occupies 169 consecutive addresses of one SPM.
  AccumulatorBank bank = AccumulatorBank::for_config(HardwareConfig{});
  for (Index a = 0; a < 13 * 13; ++a) bank.accumulate(0, a, 1);
  EXPECT_EQ(bank.value(0, 168), 1);
  EXPECT_EQ(bank.value(0, 169), 0);
}

TEST(Pooling, CommutesWithMonotoneActivation) {
  std::mt19937_64 rng(17);
  for (const Activation act : {Activation::relu(), Activation::leaky_relu(3), Activation::leaky_relu(1)}) {
    for (int k = 0; k < 20; ++k) {
      WideTensor x(3, 7, 7);
      std::uniform_int_distribution<Accum> d(-5000, 5000);
      for (Index i = 0; i < x.size(); ++i) x.flat(i) = d(rng);
      const PoolSpec pool{3, 2};
      WideTensor activated = x;
      activated.matrix() = x.matrix().unaryExpr([&act](Accum v) { return activate(v, act); });
      EXPECT_EQ(pool_activate(x, pool, act), max_pool(activated, pool));
    }
  }
}

TEST(Pooling, RejectsPartialWindows) {
  WideTensor x(1, 6, 6);
  EXPECT_THROW(max_pool(x, PoolSpec{3, 2}), ShapeMismatch);
  EXPECT_THROW(max_pool(x, PoolSpec{7, 1}), ShapeMismatch);
  EXPECT_EQ(max_pool(x, PoolSpec{2, 2}).rows(), 3);
}

TEST(Requantize, MinimalShiftRoundHalfUp) {
  WideTensor x(1, 1, 4);
  x(0, 0, 0) = 1000;
  x(0, 0, 1) = -1000;
  x(0, 0, 2) = 12;
  x(0, 0, 3) = 4;
  const auto q = requantize(x);
  EXPECT_EQ(q.shift, 3);  // 1000 >> 3 rounds to 125
  EXPECT_EQ(q.tensor(0, 0, 0), 125);
  EXPECT_EQ(q.tensor(0, 0, 1), -125);
  EXPECT_EQ(q.tensor(0, 0, 2), 2);  // 1.5 rounds up
  EXPECT_EQ(q.tensor(0, 0, 3), 1);  // 0.5 rounds up
  WideTensor small(1, 1, 2);
  small(0, 0, 0) = 127;
  small(0, 0, 1) = -128;
  EXPECT_EQ(requantize(small).shift, 0);
}
