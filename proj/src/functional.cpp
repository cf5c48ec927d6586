#include "mpna/functional.hpp"

#include <set>
#include <sstream>

#include "mpna/accumulator.hpp"
#include "mpna/error.hpp"
#include "mpna/pooling.hpp"
#include "mpna/schedule.hpp"

namespace mpna {

namespace {

void check_filters(const LayerDescriptor& layer, const QuantFilters& f) {
  if (f.filters() != layer.out_maps || f.channels() != layer.in_maps || f.rows() != layer.kernel_rows ||
      f.cols() != layer.kernel_cols) {
    std::ostringstream os;
    os << "layer " << layer.name << ": filters " << f.filters() << "x" << f.channels() << "x" << f.rows() << "x"
       << f.cols() << " do not match descriptor " << layer.out_maps << "x" << layer.in_maps << "x"
       << layer.kernel_rows << "x" << layer.kernel_cols;
    throw ShapeMismatch(os.str());
  }
}

void append_trace(ArrayTrace* dst, ArrayRun& run, Index& base) {
  if (!dst) return;
  for (auto& rec : run.trace.cycles) {
    rec.cycle += base;
    dst->cycles.push_back(std::move(rec));
  }
  base += run.stream_cycles;
}

}  // namespace

WideTensor oracle_conv(const QuantTensor& input, const QuantFilters& filters, const LayerDescriptor& layer) {
  if (!layer.has_weights()) throw NotApplicable("oracle_conv is undefined for pooling layer " + layer.name);
  check_input_shape(layer, input.channels(), input.rows(), input.cols());
  check_filters(layer, filters);
  const Index J = layer.out_maps, I = layer.in_maps, M = layer.out_rows, N = layer.out_cols;
  const Index P = layer.kernel_rows, Q = layer.kernel_cols, S = layer.stride, pad = layer.pad;
  WideTensor out(J, M, N);
  if (layer.kind == LayerKind::FullyConnected) {
    for (Index j = 0; j < J; ++j) {
      Accum acc = 0;
      for (Index i = 0; i < I; ++i) acc += Accum{input.flat(i)} * Accum{filters(j, i, 0, 0)};
      out(j, 0, 0) = acc;
    }
    return out;
  }
  for (Index j = 0; j < J; ++j)
    for (Index m = 0; m < M; ++m)
      for (Index n = 0; n < N; ++n) {
        Accum acc = 0;
        for (Index i = 0; i < I; ++i)
          for (Index p = 0; p < P; ++p)
            for (Index q = 0; q < Q; ++q) {
              const Index r = m * S + p - pad, c = n * S + q - pad;
              if (r < 0 || c < 0 || r >= input.rows() || c >= input.cols()) continue;
              acc += Accum{input(i, r, c)} * Accum{filters(j, i, p, q)};
            }
        out(j, m, n) = acc;
      }
  return out;
}

LayerRun execute_layer(const LayerDescriptor& layer, const QuantTensor& input, const QuantFilters& filters,
                       const HardwareConfig& cfg, const DataflowPlan& plan, ArrayTrace* trace) {
  if (!layer.has_weights()) throw NotApplicable("execute_layer is undefined for pooling layer " + layer.name);
  check_filters(layer, filters);
  const Matrix<std::int8_t> lowered = im2col(input, layer);
  const Matrix<std::int8_t>& W = filters.matrix();
  const Index K = cfg.sa_rows, L = cfg.sa_cols, PQ = layer.kernel_rows * layer.kernel_cols;
  const bool fc = layer.kind == LayerKind::FullyConnected;

  WideTensor raw(layer.out_maps, layer.out_rows, layer.out_cols);
  AccumulatorBank bank = AccumulatorBank::for_config(cfg);
  LayerRun result;
  TransferLog& log = result.log;
  Index trace_base = 0;

  const bool in_dram = plan.boundary.input_in_dram;
  if (in_dram && plan.input == InputResidency::Whole) log.dram_in_act += layer.input_volume();
  std::set<std::pair<Index, Index>> weights_held;  // (group, chunk)
  Index current_group = -1, current_block = -1;

  for_each_step(layer, plan, [&](const ScheduleStep& s) {
    // Weight buffer.
    if (!plan.weights_pinned) {
      if (!plan.group_weights_resident || s.group != current_group) weights_held.clear();
    }
    if (weights_held.insert({s.group, s.chunk}).second) log.dram_weights += s.filters.size * s.channels.size * PQ;

    // Data buffer.
    const Span wr = input_window(s.rows, layer.stride, layer.kernel_rows, layer.pad, layer.in_rows());
    const Span wc = input_window(s.cols, layer.stride, layer.kernel_cols, layer.pad, layer.in_cols());
    if (in_dram && plan.input == InputResidency::PerBlock && s.block != current_block)
      log.dram_in_act += layer.in_maps * wr.size * wc.size;
    if (in_dram && plan.input == InputResidency::Streamed) log.dram_in_act += s.channels.size * wr.size * wc.size;
    current_group = s.group;
    current_block = s.block;

    // Output pixels of the block, as lowered columns.
    const Index T = s.rows.size * s.cols.size;
    std::vector<Index> pixel(static_cast<std::size_t>(T));
    for (Index m = 0; m < s.rows.size; ++m)
      for (Index n = 0; n < s.cols.size; ++n)
        pixel[static_cast<std::size_t>(m * s.cols.size + n)] = (s.rows.begin + m) * layer.out_cols + s.cols.begin + n;

    const Index r0 = s.channels.begin * PQ, nrows = s.channels.size * PQ;
    const Index n_rt = ceil_div(nrows, K);
    for (Index f0 = s.filters.begin; f0 < s.filters.end(); f0 += L) {
      const Index fcount = std::min(L, s.filters.end() - f0);
      auto deposit = [&](const Matrix<Accum>& outputs, Index column_offset, bool per_vector_pixel) {
        for (Index c = 0; c < fcount; ++c) {
          const SpmSlot slot = plan.spm_slot(f0 - s.filters.begin + c, L);
          for (Index t = 0; t < outputs.cols(); ++t)
            bank.accumulate(column_offset + slot.bank, slot.base_address + (per_vector_pixel ? t : 0), outputs(c, t));
        }
      };
      if (!fc) {
        for (Index rt = 0; rt < n_rt; ++rt) {
          const Index rr0 = r0 + rt * K, rk = std::min(K, r0 + nrows - rr0);
          Matrix<std::int8_t> vectors(rk, T);
          for (Index t = 0; t < T; ++t) vectors.col(t) = lowered.block(rr0, pixel[static_cast<std::size_t>(t)], rk, 1);
          const Matrix<std::int8_t> tile = W.block(f0, rr0, fcount, rk).transpose();
          ArrayRun run = run_sa_conv(vectors, tile, cfg, trace != nullptr);
          ++log.sa_conv_tiles;
          deposit(run.outputs, 0, true);
          append_trace(trace, run, trace_base);
        }
      } else {
        // One vector per row tile, each with its own weight set, back to back.
        Matrix<std::int8_t> vectors = Matrix<std::int8_t>::Zero(K, n_rt);
        WeightStream stream;
        for (Index rt = 0; rt < n_rt; ++rt) {
          const Index rr0 = r0 + rt * K, rk = std::min(K, r0 + nrows - rr0);
          vectors.col(rt).head(rk) = lowered.block(rr0, 0, rk, 1);
          Matrix<std::int8_t> set = Matrix<std::int8_t>::Zero(K, fcount);
          set.topRows(rk) = W.block(f0, rr0, fcount, rk).transpose();
          stream.sets.push_back(std::move(set));
        }
        ArrayRun run = run_sa_fc(vectors, stream, cfg, trace != nullptr);
        log.sa_fc_vectors += n_rt;
        deposit(run.outputs, L, false);
        append_trace(trace, run, trace_base);
      }
    }

    if (s.last_chunk) {
      const Index column_offset = fc ? L : 0;
      for (Index f = 0; f < s.filters.size; ++f) {
        const SpmSlot slot = plan.spm_slot(f, L);
        for (Index t = 0; t < T; ++t) {
          const Index px = pixel[static_cast<std::size_t>(t)];
          raw(s.filters.begin + f, px / layer.out_cols, px % layer.out_cols) =
              bank.drain(column_offset + slot.bank, slot.base_address + t);
        }
      }
    }
  });

  result.output = pool_activate(raw, layer.pool, layer.activation);
  if (!plan.output_resident) log.dram_out_act += result.output.size();
  log.accumulations = bank.accumulations();
  return result;
}

NetworkRun simulate_network(const NetworkDescriptor& net, const QuantTensor& input, const NetworkWeights& weights,
                            const HardwareConfig& cfg, const std::vector<std::optional<DataflowPlan>>& plans,
                            ArrayTrace* trace) {
  net.validate();
  if (plans.size() != net.layers.size() || weights.layers.size() != net.layers.size())
    throw ShapeMismatch("simulate_network needs one plan and one filter bank per layer");
  NetworkRun out;
  QuantTensor x = input;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    if (!l.has_weights()) {
      check_input_shape(l, x.channels(), x.rows(), x.cols());
      TransferLog log;
      log.dram_in_act = x.size();
      x = max_pool(x, PoolSpec{l.kernel_rows, l.stride});
      log.dram_out_act = x.size();
      out.shifts.push_back(0);
      out.logs.push_back(log);
      continue;
    }
    if (!plans[k]) throw InvalidConfig("layer " + l.name + " has no dataflow plan");
    LayerRun run = execute_layer(l, x, weights.layers[k], cfg, *plans[k], trace);
    Requantized rq = requantize(run.output);
    x = std::move(rq.tensor);
    out.shifts.push_back(rq.shift);
    out.logs.push_back(run.log);
  }
  out.output = std::move(x);
  return out;
}

NetworkRun oracle_network(const NetworkDescriptor& net, const QuantTensor& input, const NetworkWeights& weights) {
  net.validate();
  if (weights.layers.size() != net.layers.size())
    throw ShapeMismatch("oracle_network needs one filter bank per layer");
  NetworkRun out;
  QuantTensor x = input;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    if (!l.has_weights()) {
      x = max_pool(x, PoolSpec{l.kernel_rows, l.stride});
      out.shifts.push_back(0);
      continue;
    }
    Requantized rq = requantize(pool_activate(oracle_conv(x, weights.layers[k], l), l.pool, l.activation));
    x = std::move(rq.tensor);
    out.shifts.push_back(rq.shift);
  }
  out.output = std::move(x);
  return out;
}

}  // namespace mpna
