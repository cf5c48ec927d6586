#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/tensor.hpp"

namespace mpna {

enum class ArrayKind { SaConv, SaFc };

const char* to_string(ArrayKind kind);

/// Register state of one processing element.
///
/// Each cycle a firing PE computes partial_out = partial_in + held_weight * in_activation,
/// forwards in_activation to the right and partial_out downwards. SA-CONV PEs
/// also carry a shadow weight that is shifted in while the held weight is in use.
struct PEState {
  Accum held_weight = 0;
  Accum shadow_weight = 0;
  Accum in_activation = 0;
  Accum partial_in = 0;
  Accum partial_out = 0;
  Index tag = -1;  // index of the input vector in flight, -1 when idle
};

struct PEFiring {
  Index row = 0;
  Index col = 0;
  Accum activation = 0;
  Accum weight = 0;
  Accum partial_in = 0;
  Accum partial_out = 0;
};

struct CycleRecord {
  Index cycle = 0;
  ArrayKind array = ArrayKind::SaConv;
  std::vector<PEFiring> fired;
};

/// Per-cycle firing log. Empty unless tracing was requested.
///
/// Text form, one line per cycle:
///   <cycle> <array> <n_fired> [<row>,<col>:<act>:<weight>:<psum_in>:<psum_out> ...]
struct ArrayTrace {
  std::vector<CycleRecord> cycles;

  void write(std::ostream& os) const;
};

struct ArrayRun {
  Matrix<Accum> outputs;          // one row per used column, one column per input vector
  Index preload_cycles = 0;       // weight shift-in before streaming (SA-CONV only)
  Index stream_cycles = 0;        // first input to last output, full K x L pipeline
  Index first_output_cycle = -1;  // cycle the first result leaves the array
  ArrayTrace trace;
};

/// Runs one K x L weight tile of SA-CONV over a stream of input vectors.
///
/// `weights` is rows x cols with rows <= K and cols <= L: column c holds the
/// weights of one filter, row r one lowered weight position. `inputs` has the
/// same number of rows; column t is the t-th input vector. Row r of vector t
/// enters the array at cycle t + r and the result for column c leaves the
/// bottom at cycle t + K + c. Throws ShapeMismatch if the tile exceeds the array.
ArrayRun run_sa_conv(const Matrix<std::int8_t>& inputs, const Matrix<std::int8_t>& weights,
                     const HardwareConfig& cfg, bool trace = false);

/// Weight sets for SA-FC, one per scheduled input vector. Set t reaches PE
/// (r, c) through its dedicated connection at cycle t + r + c, aligned with the
/// activation of vector t. `available_cycle`, when non-empty, gives the cycle
/// at which each set is present in the weight buffer.
struct WeightStream {
  std::vector<Matrix<std::int8_t>> sets;
  std::vector<Index> available_cycle;
};

/// Runs SA-FC over `inputs` (one column per vector), replacing every PE weight
/// each cycle. Throws StreamUnderrun if a weight set is missing or arrives late,
/// ShapeMismatch if a set exceeds the array.
ArrayRun run_sa_fc(const Matrix<std::int8_t>& inputs, const WeightStream& weights,
                   const HardwareConfig& cfg, bool trace = false);

}  // namespace mpna
