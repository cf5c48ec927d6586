#include "mpna/systolic.hpp"

#include <ostream>
#include <sstream>

#include "mpna/error.hpp"

namespace mpna {

const char* to_string(ArrayKind kind) { return kind == ArrayKind::SaConv ? "sa_conv" : "sa_fc"; }

void ArrayTrace::write(std::ostream& os) const {
  for (const auto& rec : cycles) {
    os << rec.cycle << ' ' << to_string(rec.array) << ' ' << rec.fired.size();
    for (const auto& f : rec.fired)
      os << ' ' << f.row << ',' << f.col << ':' << f.activation << ':' << f.weight << ':' << f.partial_in
         << ':' << f.partial_out;
    os << '\n';
  }
}

namespace {

void check_tile(Index rows, Index cols, const HardwareConfig& cfg, const char* what) {
  if (rows > cfg.sa_rows || cols > cfg.sa_cols || rows < 1 || cols < 1) {
    std::ostringstream os;
    os << what << " tile " << rows << "x" << cols << " does not fit a " << cfg.sa_rows << "x" << cfg.sa_cols
       << " array";
    throw ShapeMismatch(os.str());
  }
}

// Weight seen by PE (r, c) when processing vector `tag`.
using WeightLookup = Accum (*)(const void* ctx, Index tag, Index r, Index c);

// Shared wavefront engine. Activations move right, partial sums move down;
// vector t reaches PE (r, c) at cycle t + r + c. The grid is always the full
// K x L array; rows and columns beyond the tile carry zero weights.
ArrayRun stream(const Matrix<std::int8_t>& inputs, Index used_cols, ArrayKind kind, const HardwareConfig& cfg,
                const void* ctx, WeightLookup weight_of, bool trace) {
  const Index K = cfg.sa_rows, L = cfg.sa_cols;
  const Index T = inputs.cols(), used_rows = inputs.rows();

  ArrayRun run;
  run.outputs = Matrix<Accum>::Zero(used_cols, T);
  run.stream_cycles = T + K + L - 1;
  if (T == 0) return run;

  std::vector<PEState> grid(static_cast<std::size_t>(K * L)), next(grid.size());
  auto at = [L](std::vector<PEState>& g, Index r, Index c) -> PEState& { return g[static_cast<std::size_t>(r * L + c)]; };

  // Last cycle at which a used column produces a result.
  const Index last_cycle = (T - 1) + (K - 1) + (used_cols - 1);
  for (Index t = 0; t <= last_cycle; ++t) {
    CycleRecord rec{t, kind, {}};
    for (Index r = 0; r < K; ++r) {
      for (Index c = 0; c < L; ++c) {
        PEState& pe = at(next, r, c);
        const PEState& prev_self = at(grid, r, c);
        pe.shadow_weight = prev_self.shadow_weight;
        if (c == 0) {
          const Index tag = t - r;
          const bool live = tag >= 0 && tag < T;
          pe.tag = live ? tag : -1;
          pe.in_activation = live && r < used_rows ? inputs(r, tag) : 0;
        } else {
          const PEState& left = at(grid, r, c - 1);
          pe.tag = left.tag;
          pe.in_activation = left.in_activation;
        }
        pe.partial_in = r == 0 ? 0 : at(grid, r - 1, c).partial_out;
        if (pe.tag < 0) {
          pe.partial_out = 0;
          pe.held_weight = prev_self.held_weight;
          continue;
        }
        pe.held_weight = weight_of(ctx, pe.tag, r, c);
        pe.partial_out = pe.partial_in + pe.held_weight * pe.in_activation;
        if (trace && c < used_cols)
          rec.fired.push_back({r, c, pe.in_activation, pe.held_weight, pe.partial_in, pe.partial_out});
      }
    }
    std::swap(grid, next);

    for (Index c = 0; c < used_cols; ++c) {
      const PEState& bottom = at(grid, K - 1, c);
      if (bottom.tag < 0) continue;
      run.outputs(c, bottom.tag) = bottom.partial_out;
      if (run.first_output_cycle < 0) run.first_output_cycle = t + 1;
    }
    if (trace) run.trace.cycles.push_back(std::move(rec));
  }
  return run;
}

struct ConvCtx {
  const Matrix<Accum>* held;
};

struct FcCtx {
  const WeightStream* stream;
};

}  // namespace

ArrayRun run_sa_conv(const Matrix<std::int8_t>& inputs, const Matrix<std::int8_t>& weights,
                     const HardwareConfig& cfg, bool trace) {
  check_tile(weights.rows(), weights.cols(), cfg, "SA-CONV weight");
  if (inputs.rows() != weights.rows())
    throw ShapeMismatch("SA-CONV input vectors have " + std::to_string(inputs.rows()) + " rows, weights have " +
                        std::to_string(weights.rows()));
  const Index K = cfg.sa_rows, L = cfg.sa_cols;

  // Preload: the tile enters from the top one row per cycle through the
  // shadow registers, bottom row first, then all PEs commit at once.
  Matrix<Accum> shadow = Matrix<Accum>::Zero(K, L);
  for (Index cycle = 0; cycle < K; ++cycle) {
    for (Index r = K - 1; r > 0; --r) shadow.row(r) = shadow.row(r - 1);
    const Index src = K - 1 - cycle;
    shadow.row(0).setZero();
    if (src < weights.rows())
      shadow.row(0).head(weights.cols()) = weights.row(src).cast<Accum>();
  }
  const Matrix<Accum> held = shadow;

  ConvCtx ctx{&held};
  auto lookup = [](const void* p, Index, Index r, Index c) -> Accum {
    return (*static_cast<const ConvCtx*>(p)->held)(r, c);
  };
  ArrayRun run = stream(inputs, weights.cols(), ArrayKind::SaConv, cfg, &ctx, lookup, trace);
  run.preload_cycles = K;
  return run;
}

ArrayRun run_sa_fc(const Matrix<std::int8_t>& inputs, const WeightStream& weights, const HardwareConfig& cfg,
                   bool trace) {
  const Index T = inputs.cols();
  if (static_cast<Index>(weights.sets.size()) < T)
    throw StreamUnderrun("SA-FC weight stream holds " + std::to_string(weights.sets.size()) + " sets for " +
                         std::to_string(T) + " scheduled vectors");
  if (!weights.available_cycle.empty()) {
    if (static_cast<Index>(weights.available_cycle.size()) < T)
      throw StreamUnderrun("SA-FC weight stream is missing availability for scheduled sets");
    for (Index t = 0; t < T; ++t)
      if (weights.available_cycle[static_cast<std::size_t>(t)] > t)
        throw StreamUnderrun("SA-FC weight set " + std::to_string(t) + " available at cycle " +
                             std::to_string(weights.available_cycle[static_cast<std::size_t>(t)]) +
                             " but scheduled at cycle " + std::to_string(t));
  }
  Index used_cols = 0;
  for (Index t = 0; t < T; ++t) {
    const auto& set = weights.sets[static_cast<std::size_t>(t)];
    check_tile(set.rows(), set.cols(), cfg, "SA-FC weight");
    if (set.rows() != inputs.rows())
      throw ShapeMismatch("SA-FC weight set " + std::to_string(t) + " has " + std::to_string(set.rows()) +
                          " rows, input vectors have " + std::to_string(inputs.rows()));
    if (t > 0 && set.cols() != used_cols)
      throw ShapeMismatch("SA-FC weight sets must share one column count");
    used_cols = set.cols();
  }
  if (T == 0) {
    ArrayRun run;
    run.stream_cycles = cfg.sa_rows + cfg.sa_cols - 1;
    return run;
  }

  FcCtx ctx{&weights};
  auto lookup = [](const void* p, Index tag, Index r, Index c) -> Accum {
    const auto& set = static_cast<const FcCtx*>(p)->stream->sets[static_cast<std::size_t>(tag)];
    return r < set.rows() && c < set.cols() ? Accum{set(r, c)} : Accum{0};
  };
  return stream(inputs, used_cols, ArrayKind::SaFc, cfg, &ctx, lookup, trace);
}

}  // namespace mpna
