#pragma once

#include <iosfwd>
#include <string>

#include "mpna/hardware.hpp"
#include "mpna/layer.hpp"
#include "mpna/metrics.hpp"

namespace mpna {

// Network file: '#' starts a comment, blank lines are ignored.
//
//   network <name>
//   layer name=conv1 kind=conv I=3 J=96 M=55 N=55 P=11 Q=11 stride=4 pad=0 activation=relu pool_window=3 pool_stride=2
//   layer name=fc6 kind=fc I=9216 J=4096 activation=relu
//
// kind is conv, fc or maxpool. activation is none, relu or leaky_relu:<k>
// (negative slope 2^-k). Omitted keys take the descriptor defaults (1, or
// none for activation and pooling). The network is validated after parsing.
NetworkDescriptor parse_network(std::istream& in);
NetworkDescriptor load_network(const std::string& path);
void write_network(std::ostream& out, const NetworkDescriptor& net);

// Hardware file: "key = value" lines using the HardwareConfig field names.
// Missing keys keep their defaults.
HardwareConfig parse_hardware(std::istream& in);
HardwareConfig load_hardware(const std::string& path);
void write_hardware(std::ostream& out, const HardwareConfig& cfg);

// Cost table file: "key = value" with keys dram, data_buffer, weight_buffer, spm, mac.
EnergyCostTable parse_cost_table(std::istream& in);
EnergyCostTable load_cost_table(const std::string& path);
void write_cost_table(std::ostream& out, const EnergyCostTable& costs);

/// Builtin name ("alexnet", "vgg16") or a network file path.
NetworkDescriptor resolve_network(const std::string& name_or_path);

}  // namespace mpna
