#pragma once

#include <cstdint>

#include "mpna/layer.hpp"

namespace mpna {

/// Accelerator parameters. Two arrays of sa_rows x sa_cols PEs are present
/// (SA-CONV and SA-FC); each array column owns one accumulator sub-unit.
struct HardwareConfig {
  Index sa_rows = 8;                        // K
  Index sa_cols = 8;                        // L
  Index spm_entries = 256;                  // per accumulator sub-unit
  Index weight_buffer_bytes = 36 * 1024;
  Index data_buffer_bytes = 256 * 1024;
  std::int64_t dram_bandwidth_bytes_per_s = 12'800'000'000;
  std::int64_t clock_hz = 280'000'000;
  Index bytes_per_element = 1;

  /// The 8x8 / 256-entry SPM / 36 KB / 256 KB / 12.8 GB/s / 280 MHz configuration.
  static HardwareConfig defaults() { return {}; }

  HardwareConfig with_array(Index rows, Index cols) const {
    HardwareConfig c = *this;
    c.sa_rows = rows;
    c.sa_cols = cols;
    return c;
  }

  double dram_bytes_per_cycle() const {
    return static_cast<double>(dram_bandwidth_bytes_per_s) / static_cast<double>(clock_hz);
  }

  /// Cycles to move `bytes` over DRAM, rounded up. Exact integer arithmetic.
  std::int64_t dram_cycles(std::int64_t bytes) const;

  Index weight_buffer_elements() const { return weight_buffer_bytes / bytes_per_element; }
  Index data_buffer_elements() const { return data_buffer_bytes / bytes_per_element; }

  void validate() const;

  friend bool operator==(const HardwareConfig&, const HardwareConfig&) = default;
};

}  // namespace mpna
