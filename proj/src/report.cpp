#include "mpna/report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "mpna/error.hpp"
#include "mpna/model.hpp"
#include "mpna/planner.hpp"

namespace mpna {

void write_analysis(std::ostream& out, const NetworkDescriptor& net) {
  out << "layer,kind,I,J,M,N,P,Q,stride,macs,weights,input_reuse,output_reuse,weight_reuse\n";
  for (const auto& l : net.layers) {
    out << l.name << ',' << to_string(l.kind) << ',' << l.in_maps << ',' << l.out_maps << ',' << l.out_rows << ','
        << l.out_cols << ',' << l.kernel_rows << ',' << l.kernel_cols << ',' << l.stride;
    if (l.has_weights()) {
      const ReuseProfile r = reuse_profile(l);
      out << ',' << mac_count(l) << ',' << weight_count(l) << ',' << r.input_act_reuse << ','
          << r.output_act_reuse << ',' << r.weight_reuse;
    } else {
      out << ",0,0,,,";
    }
    out << '\n';
  }
  const NetworkTotals t = network_totals(net);
  out << std::fixed << std::setprecision(2);
  out << "total,conv_macs," << t.conv_macs << ",conv_macs_G," << t.conv_macs / 1e9 << '\n';
  out << "total,fc_macs," << t.fc_macs << ",fc_macs_M," << t.fc_macs / 1e6 << '\n';
  out << "total,conv_weights," << t.conv_weights << ",conv_weights_M," << t.conv_weights / 1e6 << '\n';
  out << "total,fc_weights," << t.fc_weights << ",fc_weights_M," << t.fc_weights / 1e6 << '\n';
  out.unsetf(std::ios::floatfield);
}

void write_plans(std::ostream& out, const NetworkDescriptor& net,
                 const std::vector<std::optional<DataflowPlan>>& plans) {
  Index total = 0;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    if (!plans[k]) {
      out << "layer=" << net.layers[k].name << " pooling dram_total="
          << net.layers[k].input_volume() + net.layers[k].output_volume() << '\n';
      total += net.layers[k].input_volume() + net.layers[k].output_volume();
      continue;
    }
    out << format_plan(net.layers[k], *plans[k]) << '\n';
    total += plans[k]->traffic.dram_total();
  }
  out << "network=" << net.name << " dram_total=" << total << '\n';
}

void write_timing(std::ostream& out, const NetworkDescriptor& net, const HardwareConfig& cfg,
                  const NetworkTiming& timing, Architecture arch) {
  out << "layer,architecture,arrays,bound,tiles,compute,weight_load,fill_drain,dram,total,utilization\n";
  out << std::fixed << std::setprecision(4);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    if (!timing.layers[k]) continue;
    const LayerTiming& t = *timing.layers[k];
    out << net.layers[k].name << ',' << to_string(arch) << ',' << t.arrays << ',' << to_string(t.bound) << ','
        << t.tiles << ',' << t.compute_cycles << ',' << t.weight_load_cycles << ',' << t.fill_drain_cycles << ','
        << t.dram_transfer_cycles << ',' << t.total_cycles << ',' << t.utilization(cfg) << '\n';
  }
  out << "total_conv,,,,,,,,," << timing.conv_cycles << ",\n";
  out << "total_fc,,,,,,,,," << timing.fc_cycles << ",\n";
  out.unsetf(std::ios::floatfield);
}

void write_report_csv(std::ostream& out, const SimReport& report) {
  out << "report,layer,cycles,seconds,macs,gops,dram_elements,dram_bytes,data_buffer,weight_buffer,spm,energy,"
         "utilization,bound\n";
  auto row = [&](const LayerReport& r) {
    out << report.label << ',' << r.name << ',' << r.cycles << ',' << std::setprecision(9) << r.seconds.value() << ','
        << r.macs << ',' << std::setprecision(6) << r.gops.value() << ',' << r.traffic.dram_total() << ','
        << r.dram_bytes << ',' << r.traffic.onchip.data_buffer << ',' << r.traffic.onchip.weight_buffer << ','
        << r.traffic.onchip.spm << ',' << std::setprecision(12) << r.energy << ',' << std::setprecision(4)
        << r.utilization << ',' << to_string(r.bound) << '\n';
  };
  for (const auto& l : report.layers) row(l);
  row(report.total);
  out << std::setprecision(6);
}

void write_summary(std::ostream& out, const SimReport& candidate, const SimReport& reference,
                   const std::vector<SensitivityRow>& sensitivity) {
  const Comparison c = compare(reference, candidate);
  out << std::setprecision(4);
  out << candidate.label << ": " << candidate.total.cycles << " cycles, " << candidate.total.gops.value()
      << " GOPS, " << candidate.total.traffic.dram_total() << " DRAM elements, energy " << candidate.total.energy
      << '\n';
  out << reference.label << ": " << reference.total.cycles << " cycles, " << reference.total.gops.value()
      << " GOPS, " << reference.total.traffic.dram_total() << " DRAM elements, energy " << reference.total.energy
      << '\n';
  out << "reference is conventional-array-only with naive per-MAC DRAM streaming\n";
  out << "speedup " << c.cycles << "x, DRAM traffic " << 1.0 / c.dram << " of reference, energy " << 1.0 / c.energy
      << " of reference\n";
  if (!sensitivity.empty()) {
    double lo = sensitivity.front().ratio, hi = lo;
    for (const auto& r : sensitivity) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    out << "energy ratio across cost sensitivity sweep: " << lo << " .. " << hi << '\n';
  }
  out << std::setprecision(6);
}

void write_speedups(std::ostream& out, const std::vector<SpeedupRow>& rows) {
  out << "rows,cols,conv_conventional_cycles,fc_conventional_cycles,conv_mpna_cycles,fc_mpna_cycles,"
         "conv_conventional_speedup,fc_conventional_speedup,conv_mpna_speedup,fc_mpna_speedup,mpna_vs_conventional\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& r : rows)
    out << r.rows << ',' << r.cols << ',' << r.conventional.conv_cycles << ',' << r.conventional.fc_cycles << ','
        << r.mpna.conv_cycles << ',' << r.mpna.fc_cycles << ',' << r.conventional_conv_speedup << ','
        << r.conventional_fc_speedup << ',' << r.mpna_conv_speedup << ',' << r.mpna_fc_speedup << ','
        << r.mpna_vs_conventional << '\n';
  out.unsetf(std::ios::floatfield);
}

std::vector<std::string> write_plot_files(const std::string& prefix, const std::vector<SpeedupRow>& rows,
                                          const NetworkDescriptor& net,
                                          const std::vector<std::optional<DataflowPlan>>& plans) {
  const std::string speedup = prefix + "speedup.dat", traffic = prefix + "traffic.dat";
  std::ofstream s(speedup);
  if (!s) throw InvalidConfig("cannot write " + speedup);
  s << "# pes conv_conventional fc_conventional conv_mpna fc_mpna mpna_vs_conventional\n";
  s << std::fixed << std::setprecision(4);
  for (const auto& r : rows)
    s << r.rows * r.cols << ' ' << r.conventional_conv_speedup << ' ' << r.conventional_fc_speedup << ' '
      << r.mpna_conv_speedup << ' ' << r.mpna_fc_speedup << ' ' << r.mpna_vs_conventional << '\n';

  std::ofstream t(traffic);
  if (!t) throw InvalidConfig("cannot write " + traffic);
  t << "# layer dram_in dram_out dram_weights naive_total\n";
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    if (!plans[k]) continue;
    const auto& l = net.layers[k];
    t << l.name << ' ' << plans[k]->traffic.dram_in_act << ' ' << plans[k]->traffic.dram_out_act << ' '
      << plans[k]->traffic.dram_weights << ' ' << naive_traffic(l).dram_total() << '\n';
  }
  return {speedup, traffic};
}

}  // namespace mpna
