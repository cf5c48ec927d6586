#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpna/metrics.hpp"
#include "mpna/plan.hpp"
#include "mpna/timing.hpp"

namespace mpna {

/// Per-layer MACs, weights and reuse factors plus network totals, as CSV.
void write_analysis(std::ostream& out, const NetworkDescriptor& net);

/// One format_plan record per weighted layer, then the network DRAM total.
void write_plans(std::ostream& out, const NetworkDescriptor& net,
                 const std::vector<std::optional<DataflowPlan>>& plans);

/// Per-layer timing rows: layer, architecture, bound, cycles breakdown, utilization.
void write_timing(std::ostream& out, const NetworkDescriptor& net, const HardwareConfig& cfg,
                  const NetworkTiming& timing, Architecture arch);

/// SimReport as CSV, one row per layer and a total row.
void write_report_csv(std::ostream& out, const SimReport& report);

/// Human-readable comparison of a candidate against a reference.
void write_summary(std::ostream& out, const SimReport& candidate, const SimReport& reference,
                   const std::vector<SensitivityRow>& sensitivity);

/// Sweep table as CSV.
void write_speedups(std::ostream& out, const std::vector<SpeedupRow>& rows);

/// Plot-ready whitespace-separated series: speedup vs array size
/// (<prefix>speedup.dat) and DRAM traffic breakdown per layer
/// (<prefix>traffic.dat). Returns the paths written.
std::vector<std::string> write_plot_files(const std::string& prefix, const std::vector<SpeedupRow>& rows,
                                          const NetworkDescriptor& net,
                                          const std::vector<std::optional<DataflowPlan>>& plans);

}  // namespace mpna
