#include "mpna/metrics.hpp"

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "mpna/planner.hpp"

namespace mpna {

namespace {

Int128 gcd128(Int128 a, Int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Ratio Ratio::of(Int128 num, Int128 den) {
  if (den == 0) throw InvalidConfig("ratio with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const Int128 g = gcd128(num, den);
  return g == 0 ? Ratio{0, 1} : Ratio{num / g, den / g};
}

Ratio operator*(const Ratio& a, const Ratio& b) {
  // Cross-reduce first to keep the products small.
  const Int128 g1 = gcd128(a.num, b.den), g2 = gcd128(b.num, a.den);
  const Int128 n1 = g1 ? a.num / g1 : a.num, d2 = g1 ? b.den / g1 : b.den;
  const Int128 n2 = g2 ? b.num / g2 : b.num, d1 = g2 ? a.den / g2 : a.den;
  return Ratio::of(n1 * n2, d1 * d2);
}

void EnergyCostTable::validate() const {
  if (!(mac > 0)) throw InvalidConfig("cost table: MAC cost must be > 0");
  if (!(spm > 0)) throw InvalidConfig("cost table: SPM cost must be > 0");
  if (!(data_buffer > spm && weight_buffer > spm))
    throw InvalidConfig("cost table: buffer accesses must cost more than SPM accesses");
  if (!(dram > data_buffer && dram > weight_buffer))
    throw InvalidConfig("cost table: DRAM accesses must cost more than buffer accesses");
}

const char* to_string(CostField field) {
  switch (field) {
    case CostField::Dram:
      return "dram";
    case CostField::DataBuffer:
      return "data_buffer";
    case CostField::WeightBuffer:
      return "weight_buffer";
    case CostField::Spm:
      return "spm";
    case CostField::Mac:
      return "mac";
  }
  return "?";
}

double& cost_of(EnergyCostTable& costs, CostField field) {
  switch (field) {
    case CostField::Dram:
      return costs.dram;
    case CostField::DataBuffer:
      return costs.data_buffer;
    case CostField::WeightBuffer:
      return costs.weight_buffer;
    case CostField::Spm:
      return costs.spm;
    case CostField::Mac:
      break;
  }
  return costs.mac;
}

double energy(const Traffic& t, Index macs, const EnergyCostTable& c) {
  return static_cast<double>(t.dram_total()) * c.dram + static_cast<double>(t.onchip.data_buffer) * c.data_buffer +
         static_cast<double>(t.onchip.weight_buffer) * c.weight_buffer + static_cast<double>(t.onchip.spm) * c.spm +
         static_cast<double>(macs) * c.mac;
}

void finalize(LayerReport& r, const HardwareConfig& cfg, const EnergyCostTable& costs) {
  r.dram_bytes = r.traffic.dram_total() * cfg.bytes_per_element;
  r.energy = energy(r.traffic, r.macs, costs);
  r.seconds = Ratio::of(r.cycles, cfg.clock_hz);
  r.gops = r.cycles == 0 ? Ratio{}
                         : Ratio::of(static_cast<Int128>(2) * r.macs * cfg.clock_hz,
                                     static_cast<Int128>(r.cycles) * 1'000'000'000);
}

namespace {

void add(Traffic& a, const Traffic& b) {
  a.dram_in_act += b.dram_in_act;
  a.dram_out_act += b.dram_out_act;
  a.dram_weights += b.dram_weights;
  a.onchip.data_buffer += b.onchip.data_buffer;
  a.onchip.weight_buffer += b.onchip.weight_buffer;
  a.onchip.spm += b.onchip.spm;
}

LayerReport pooling_row(const LayerDescriptor& l, const HardwareConfig& cfg) {
  LayerReport r;
  r.name = l.name;
  r.kind = l.kind;
  r.traffic.dram_in_act = l.input_volume();
  r.traffic.dram_out_act = l.output_volume();
  r.cycles = cfg.dram_cycles(r.traffic.dram_total() * cfg.bytes_per_element);
  r.bound = Bound::MemoryBound;
  return r;
}

void total_up(SimReport& rep, const HardwareConfig& cfg, const EnergyCostTable& costs, Index peak_macs_per_cycle) {
  rep.clock_hz = cfg.clock_hz;
  rep.total = {};
  rep.total.name = "total";
  for (const auto& l : rep.layers) {
    rep.total.cycles += l.cycles;
    rep.total.macs += l.macs;
    add(rep.total.traffic, l.traffic);
  }
  finalize(rep.total, cfg, costs);
  rep.total.energy = 0;
  for (const auto& l : rep.layers) rep.total.energy += l.energy;
  rep.total.utilization = rep.total.cycles == 0 ? 0.0
                                                : static_cast<double>(rep.total.macs) /
                                                      (static_cast<double>(rep.total.cycles) * static_cast<double>(peak_macs_per_cycle));
}

}  // namespace

SimReport mpna_report(const NetworkDescriptor& net, const HardwareConfig& cfg, const EnergyCostTable& costs) {
  const auto plans = plan_network(net, cfg);
  const auto timing = time_network(net, cfg, plans, Architecture::Mpna);
  SimReport rep;
  rep.label = "mpna";
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    LayerReport r;
    if (!l.has_weights()) {
      r = pooling_row(l, cfg);
    } else {
      const LayerTiming& t = *timing.layers[k];
      r.name = l.name;
      r.kind = l.kind;
      r.cycles = t.total_cycles;
      r.macs = t.macs;
      r.traffic = plans[k]->traffic;
      r.utilization = t.utilization(cfg);
      r.bound = t.bound;
    }
    finalize(r, cfg, costs);
    rep.layers.push_back(std::move(r));
  }
  total_up(rep, cfg, costs, 2 * cfg.sa_rows * cfg.sa_cols);
  return rep;
}

SimReport baseline_report(const NetworkDescriptor& net, const HardwareConfig& cfg, const EnergyCostTable& costs) {
  const auto plans = plan_network(net, cfg);
  SimReport rep;
  rep.label = "baseline";
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    LayerReport r;
    if (!l.has_weights()) {
      r = pooling_row(l, cfg);
    } else {
      DataflowPlan p = *plans[k];
      const Index planned_spm = p.traffic.onchip.spm;
      p.traffic = naive_traffic(l);
      p.traffic.onchip.data_buffer = 2 * (p.traffic.dram_in_act + p.traffic.dram_out_act);
      p.traffic.onchip.weight_buffer = 2 * p.traffic.dram_weights;
      p.traffic.onchip.spm = planned_spm;
      const LayerTiming t = time_sa_conv(l, cfg, p);
      r.name = l.name;
      r.kind = l.kind;
      r.cycles = t.total_cycles;
      r.macs = t.macs;
      r.traffic = p.traffic;
      r.utilization = t.utilization(cfg);
      r.bound = t.bound;
    }
    finalize(r, cfg, costs);
    rep.layers.push_back(std::move(r));
  }
  total_up(rep, cfg, costs, cfg.sa_rows * cfg.sa_cols);
  return rep;
}

Comparison compare(const SimReport& a, const SimReport& b) {
  auto ratio = [](double x, double y) { return x == y ? 1.0 : x / y; };
  Comparison c;
  c.cycles = ratio(static_cast<double>(a.total.cycles), static_cast<double>(b.total.cycles));
  c.dram = ratio(static_cast<double>(a.total.traffic.dram_total()), static_cast<double>(b.total.traffic.dram_total()));
  c.onchip = ratio(static_cast<double>(a.total.traffic.onchip.total()), static_cast<double>(b.total.traffic.onchip.total()));
  c.energy = ratio(a.total.energy, b.total.energy);
  return c;
}

std::vector<SensitivityRow> sensitivity_sweep(const SimReport& candidate, const SimReport& reference,
                                              const EnergyCostTable& costs, const std::vector<double>& factors) {
  auto row = [&](CostField field, double factor) {
    EnergyCostTable c = costs;
    cost_of(c, field) *= factor;
    SensitivityRow r{field, factor, 0, 0, 0};
    for (const auto& l : candidate.layers) r.candidate_energy += energy(l.traffic, l.macs, c);
    for (const auto& l : reference.layers) r.reference_energy += energy(l.traffic, l.macs, c);
    r.ratio = r.reference_energy == 0 ? 0.0 : r.candidate_energy / r.reference_energy;
    return r;
  };
  std::vector<SensitivityRow> rows{row(CostField::Dram, 1.0)};
  for (CostField f : {CostField::Dram, CostField::DataBuffer, CostField::WeightBuffer, CostField::Spm, CostField::Mac})
    for (double x : factors) rows.push_back(row(f, x));
  return rows;
}

}  // namespace mpna
