#pragma once

#include <string>
#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/plan.hpp"
#include "mpna/timing.hpp"

namespace mpna {

__extension__ typedef __int128 Int128;

/// Exact non-negative rational, kept in lowest terms.
struct Ratio {
  Int128 num = 0;
  Int128 den = 1;

  static Ratio of(Int128 num, Int128 den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Ratio operator*(const Ratio& a, const Ratio& b);
  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num == b.num && a.den == b.den; }
};

/// Relative energy per access and per MAC.
struct EnergyCostTable {
  double dram = 200;
  double data_buffer = 6;
  double weight_buffer = 6;
  double spm = 2;
  double mac = 1;

  /// Throws InvalidConfig unless DRAM > each buffer > SPM > 0 and MAC > 0.
  void validate() const;

  friend bool operator==(const EnergyCostTable&, const EnergyCostTable&) = default;
};

enum class CostField { Dram, DataBuffer, WeightBuffer, Spm, Mac };

const char* to_string(CostField field);
double& cost_of(EnergyCostTable& costs, CostField field);

/// sum over levels of accesses * cost, plus MACs * MAC cost. DRAM accesses are
/// the three DRAM element counts.
double energy(const Traffic& traffic, Index macs, const EnergyCostTable& costs);

struct LayerReport {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::int64_t cycles = 0;
  Index macs = 0;
  Traffic traffic;
  Index dram_bytes = 0;
  double energy = 0;
  double utilization = 0;
  Bound bound = Bound::ComputeBound;
  Ratio seconds;  // cycles / clock_hz
  Ratio gops;     // 2 * MACs / seconds / 1e9
};

struct SimReport {
  std::string label;
  std::int64_t clock_hz = 0;
  std::vector<LayerReport> layers;
  LayerReport total;  // sums of the per-layer entries
};

/// Fills seconds, GOPS and energy of `r` from its cycles, MACs and traffic.
void finalize(LayerReport& r, const HardwareConfig& cfg, const EnergyCostTable& costs);

/// MPNA: planned dataflow, CONV on both arrays, FC on SA-FC.
SimReport mpna_report(const NetworkDescriptor& net, const HardwareConfig& cfg, const EnergyCostTable& costs);

/// Reference architecture: one conventional array for every layer and naive
/// per-MAC streaming from DRAM. Every DRAM element passes through an on-chip
/// buffer once in and once out; SPM accesses equal the planned ones.
SimReport baseline_report(const NetworkDescriptor& net, const HardwareConfig& cfg, const EnergyCostTable& costs);

/// Ratios a / b of cycles, DRAM elements, on-chip accesses and energy. With
/// a = baseline and b = MPNA these are the speedup and savings factors.
struct Comparison {
  double cycles = 1;
  double dram = 1;
  double onchip = 1;
  double energy = 1;
};

Comparison compare(const SimReport& a, const SimReport& b);

/// Energy of both reports with one coefficient scaled; ratio = candidate / reference.
struct SensitivityRow {
  CostField field = CostField::Dram;
  double factor = 1;
  double candidate_energy = 0;
  double reference_energy = 0;
  double ratio = 0;
};

/// Every coefficient at each factor (the default table first, as factor 1).
std::vector<SensitivityRow> sensitivity_sweep(const SimReport& candidate, const SimReport& reference,
                                              const EnergyCostTable& costs,
                                              const std::vector<double>& factors = {0.5, 2.0});

}  // namespace mpna
