#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpna/hardware.hpp"
#include "mpna/plan.hpp"

namespace mpna {

/// Dataflow case of a CONV/FC layer.
///
/// Sizes are in bytes: IF is the stored input, OF the output after the fused
/// pooling stage (that is what reaches the data buffer).
///   1: IF + OF fit the data buffer and one output map (M*N) fits one SPM.
///   2: IF + OF fit, M*N does not, and L complete filters fit the weight buffer.
///   3: IF + OF do not both fit but IF does.
///   4: everything else.
/// Throws NotApplicable for pooling layers.
int classify(const LayerDescriptor& layer, const HardwareConfig& cfg);

/// Activation placement for a layer planned on its own: the input is already
/// on chip whenever it fits (cases 1-3) and the output stays on chip in
/// cases 1 and 2.
LayerBoundary standalone_boundary(int case_id);

/// Minimum-DRAM-traffic plan following the layer's own case.
DataflowPlan plan(const LayerDescriptor& layer, const HardwareConfig& cfg);
DataflowPlan plan(const LayerDescriptor& layer, const HardwareConfig& cfg, const LayerBoundary& boundary);

/// Minimum-traffic plan obeying the dataflow rules of `case_id`:
///   1: a single output block, whole input resident, output kept on chip.
///   2: filter-group outer loop with the group's filters resident, whole input
///      resident, output kept on chip; groups of 2L filters when they fit, else L.
///   3: whole input resident, output drained to DRAM.
///   4: any legal tiling.
/// Output is kept on chip only if the boundary allows it. Throws
/// PlanInfeasible when no tiling satisfies the rules.
DataflowPlan plan_with_case(const LayerDescriptor& layer, const HardwareConfig& cfg, int case_id,
                            const LayerBoundary& boundary);

/// Plans every layer in order. The first input comes from DRAM and the last
/// output goes to DRAM. A layer's output stays on chip when its case is 1 or
/// 2 and the next layer's case is 1, 2 or 3. Pooling layers get no plan and
/// are treated as a DRAM-to-DRAM pass.
std::vector<std::optional<DataflowPlan>> plan_network(const NetworkDescriptor& net, const HardwareConfig& cfg);

/// Closed-form traffic of `plan` (its tiles, order, residency and boundary).
Traffic evaluate_traffic(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan);

/// No-reuse reference: every MAC fetches its input and weight from DRAM and
/// every raw output is written once. On-chip counts are zero.
Traffic naive_traffic(const LayerDescriptor& layer);

/// Walks the plan's schedule independently of the planner and returns every
/// violated invariant: tile legality, case rules, buffer and SPM capacity,
/// SPM address collisions, and DRAM traffic disagreeing with the walk.
/// Empty means valid.
std::vector<std::string> validate_plan(const LayerDescriptor& layer, const HardwareConfig& cfg,
                                       const DataflowPlan& plan);

/// Smallest legal channel chunk: Ti * P * Q must be a multiple of K unless Ti = I.
Index min_channel_tile(const LayerDescriptor& layer, const HardwareConfig& cfg);

/// Peak buffer/SPM occupancy (elements) implied by a plan.
struct Footprint {
  Index data_buffer = 0;
  Index weight_buffer = 0;
  Index spm_per_bank = 0;
};

Footprint footprint(const LayerDescriptor& layer, const HardwareConfig& cfg, const DataflowPlan& plan);

/// One-line record: name, case, tiles, order, residency and traffic.
std::string format_plan(const LayerDescriptor& layer, const DataflowPlan& plan);

}  // namespace mpna
