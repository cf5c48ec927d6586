// Command-line front end: analyze, plan, simulate, time and sweep.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "mpna/config_io.hpp"
#include "mpna/error.hpp"
#include "mpna/functional.hpp"
#include "mpna/metrics.hpp"
#include "mpna/model.hpp"
#include "mpna/planner.hpp"
#include "mpna/report.hpp"
#include "mpna/timing.hpp"

namespace {

struct RunSpec {
  std::string mode = "analyze";
  std::string network = "alexnet";
  std::string hw;
  std::string cost_table;
  std::uint64_t seed = 1;
  std::string out;
  bool check = false;
  std::string trace;
  std::string array_sizes = "1x1,2x2,4x4,8x8";
};

std::vector<std::pair<mpna::Index, mpna::Index>> parse_sizes(const std::string& text) {
  std::vector<std::pair<mpna::Index, mpna::Index>> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument(item);
      std::size_t a = 0, b = 0;
      const long r = std::stol(item.substr(0, x), &a), c = std::stol(item.substr(x + 1), &b);
      if (a != x || b != item.size() - x - 1 || r < 1 || c < 1) throw std::invalid_argument(item);
      sizes.emplace_back(r, c);
    } catch (const std::exception&) {
      throw mpna::InvalidConfig("bad array size '" + item + "' (expected RxC)");
    }
  }
  if (sizes.empty()) throw mpna::InvalidConfig("no array sizes given");
  return sizes;
}

int run_simulate(const RunSpec& spec, const mpna::NetworkDescriptor& net, const mpna::HardwareConfig& cfg,
                 std::ostream& out) {
  std::mt19937_64 rng(spec.seed);
  const auto weights = mpna::random_weights(net, rng);
  const auto& first = net.layers.front();
  const mpna::QuantTensor input = first.kind == mpna::LayerKind::FullyConnected
                                      ? mpna::random_tensor(first.in_maps, 1, 1, rng)
                                      : mpna::random_tensor(first.in_maps, first.in_rows(), first.in_cols(), rng);
  const auto plans = mpna::plan_network(net, cfg);
  mpna::ArrayTrace trace;
  const auto run = mpna::simulate_network(net, input, weights, cfg, plans, spec.trace.empty() ? nullptr : &trace);

  out << "layer,shift,dram_in,dram_out,dram_weights,planned_dram,sa_conv_tiles,sa_fc_vectors,accumulations\n";
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& log = run.logs[k];
    const mpna::Index planned = plans[k] ? plans[k]->traffic.dram_total() : log.dram_total();
    out << net.layers[k].name << ',' << run.shifts[k] << ',' << log.dram_in_act << ',' << log.dram_out_act << ','
        << log.dram_weights << ',' << planned << ',' << log.sa_conv_tiles << ',' << log.sa_fc_vectors << ','
        << log.accumulations << '\n';
  }
  std::int64_t checksum = 0;
  for (mpna::Index i = 0; i < run.output.size(); ++i) checksum = checksum * 31 + run.output.flat(i);
  out << "output_elements=" << run.output.size() << " checksum=" << checksum << '\n';

  if (!spec.trace.empty()) {
    std::ofstream t(spec.trace);
    if (!t) throw mpna::InvalidConfig("cannot write " + spec.trace);
    trace.write(t);
  }
  if (spec.check) {
    const auto ref = mpna::oracle_network(net, input, weights);
    if (!(ref.output == run.output) || ref.shifts != run.shifts) {
      out << "oracle MISMATCH\n";
      std::cerr << "error: simulated output differs from the oracle composition\n";
      return 2;
    }
    out << "oracle match\n";
  }
  return 0;
}

int run(const RunSpec& spec) {
  const mpna::NetworkDescriptor net = mpna::resolve_network(spec.network);
  const mpna::HardwareConfig cfg = spec.hw.empty() ? mpna::HardwareConfig::defaults() : mpna::load_hardware(spec.hw);
  const mpna::EnergyCostTable costs =
      spec.cost_table.empty() ? mpna::EnergyCostTable{} : mpna::load_cost_table(spec.cost_table);

  std::ostringstream body;
  body << "# mpna mode=" << spec.mode << " network=" << net.name << " hw=" << (spec.hw.empty() ? "default" : spec.hw)
       << " seed=" << spec.seed << '\n';
  int status = 0;
  if (spec.mode == "analyze") {
    mpna::write_analysis(body, net);
  } else if (spec.mode == "plan") {
    mpna::write_plans(body, net, mpna::plan_network(net, cfg));
  } else if (spec.mode == "simulate") {
    status = run_simulate(spec, net, cfg, body);
  } else if (spec.mode == "time") {
    const auto plans = mpna::plan_network(net, cfg);
    mpna::write_timing(body, net, cfg, mpna::time_network(net, cfg, plans, mpna::Architecture::Mpna),
                       mpna::Architecture::Mpna);
    mpna::write_timing(body, net, cfg, mpna::time_network(net, cfg, plans, mpna::Architecture::Conventional),
                       mpna::Architecture::Conventional);
    const auto mpna_rep = mpna::mpna_report(net, cfg, costs);
    const auto base_rep = mpna::baseline_report(net, cfg, costs);
    mpna::write_report_csv(body, mpna_rep);
    mpna::write_report_csv(body, base_rep);
    mpna::write_summary(body, mpna_rep, base_rep, mpna::sensitivity_sweep(mpna_rep, base_rep, costs));
  } else if (spec.mode == "sweep") {
    const auto rows = mpna::speedup_report(net, cfg, parse_sizes(spec.array_sizes));
    mpna::write_speedups(body, rows);
    if (!spec.out.empty()) {
      const std::filesystem::path p(spec.out);
      const std::string prefix = (p.parent_path() / p.stem()).string() + ".";
      for (const auto& f : mpna::write_plot_files(prefix, rows, net, mpna::plan_network(net, cfg)))
        body << "# wrote " << f << '\n';
    }
  } else {
    throw mpna::InvalidConfig("unknown mode '" + spec.mode + "'");
  }

  if (spec.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(spec.out);
    if (!f) throw mpna::InvalidConfig("cannot write " + spec.out);
    f << body.str();
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPNA accelerator analysis, planning, simulation and timing"};
  RunSpec spec;
  app.add_option("--mode", spec.mode, "analyze | plan | simulate | time | sweep")
      ->check(CLI::IsMember({"analyze", "plan", "simulate", "time", "sweep"}));
  app.add_option("--network", spec.network, "builtin name (alexnet, vgg16) or network file");
  app.add_option("--hw", spec.hw, "hardware config file (default: 8x8 array, 36 KB / 256 KB buffers, 12.8 GB/s, 280 MHz)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", spec.seed, "seed for random weights and inputs");
  app.add_option("--out", spec.out, "write the report here instead of stdout");
  app.add_flag("--check", spec.check, "simulate: compare against the oracle, exit nonzero on mismatch");
  app.add_option("--trace", spec.trace, "simulate: write the per-cycle array trace to this file");
  app.add_option("--array-sizes", spec.array_sizes, "sweep: comma-separated RxC list");
  app.add_option("--cost-table", spec.cost_table, "energy cost table file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run(spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
