#pragma once

#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/tensor.hpp"

namespace mpna {

/// Accumulation unit: one sub-unit per systolic column, each an SPM of
/// spm_entries wide accumulators with a single adder.
class AccumulatorBank {
 public:
  AccumulatorBank(Index sub_units, Index spm_entries);

  /// One sub-unit per column of both arrays.
  static AccumulatorBank for_config(const HardwareConfig& cfg) {
    return AccumulatorBank(2 * cfg.sa_cols, cfg.spm_entries);
  }

  Index sub_units() const { return spm_.cols(); }
  Index spm_entries() const { return spm_.rows(); }

  /// SPM[column][address] += partial. Throws AddressOverflow on a bad address.
  void accumulate(Index column, Index address, Accum partial);

  Accum value(Index column, Index address) const;

  /// Returns the completed value and clears the entry.
  Accum drain(Index column, Index address);

  void clear() { spm_.setZero(); }

  /// Number of adder operations performed so far.
  Index accumulations() const { return accumulations_; }

 private:
  void check(Index column, Index address) const;

  Matrix<Accum> spm_;  // spm_entries x sub_units
  Index accumulations_ = 0;
};

}  // namespace mpna
