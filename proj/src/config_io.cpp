#include "mpna/config_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mpna/error.hpp"
#include "mpna/model.hpp"

namespace mpna {

namespace {

std::string strip(const std::string& s) {
  std::string out = s.substr(0, s.find('#'));
  const auto b = out.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = out.find_last_not_of(" \t\r");
  return out.substr(b, e - b + 1);
}

[[noreturn]] void bad(int line, const std::string& what) {
  throw InvalidConfig("line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_int(const std::string& text, int line, const std::string& key) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) bad(line, "'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

double parse_double(const std::string& text, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    bad(line, "'" + key + "' expects a number, got '" + text + "'");
  }
}

Activation parse_activation(const std::string& text, int line) {
  if (text == "none") return Activation::none();
  if (text == "relu") return Activation::relu();
  if (text == "leaky_relu") return Activation::leaky_relu();
  if (text.rfind("leaky_relu:", 0) == 0)
    return Activation::leaky_relu(parse_int<int>(text.substr(11), line, "activation"));
  bad(line, "unknown activation '" + text + "'");
}

// Reads "key = value" lines into a map, rejecting unknown keys.
std::map<std::string, std::pair<std::string, int>> read_pairs(std::istream& in, const char* const* keys,
                                                              std::size_t n_keys, const char* what) {
  std::map<std::string, std::pair<std::string, int>> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad(line, std::string("expected key = value in ") + what + " file");
    const std::string key = strip(s.substr(0, eq)), value = strip(s.substr(eq + 1));
    bool known = false;
    for (std::size_t k = 0; k < n_keys; ++k) known |= key == keys[k];
    if (!known) bad(line, std::string("unknown ") + what + " key '" + key + "'");
    out[key] = {value, line};
  }
  return out;
}

std::ifstream open(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidConfig("cannot open " + path);
  return f;
}

}  // namespace

NetworkDescriptor parse_network(std::istream& in) {
  NetworkDescriptor net;
  std::string raw;
  int line = 0;
  bool named = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string head;
    ls >> head;
    if (head == "network") {
      if (!(ls >> net.name)) bad(line, "network needs a name");
      named = true;
      continue;
    }
    if (head != "layer") bad(line, "expected 'network' or 'layer', got '" + head + "'");

    LayerDescriptor l;
    l.activation = Activation::none();
    Index pool_window = 0, pool_stride = 0;
    std::string tok;
    bool has_kind = false;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) bad(line, "expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
      auto num = [&] { return parse_int<Index>(value, line, key); };
      if (key == "name") l.name = value;
      else if (key == "kind") {
        has_kind = true;
        if (value == "conv") l.kind = LayerKind::Conv;
        else if (value == "fc") l.kind = LayerKind::FullyConnected;
        else if (value == "maxpool") l.kind = LayerKind::MaxPool;
        else bad(line, "unknown layer kind '" + value + "'");
      } else if (key == "I") l.in_maps = num();
      else if (key == "J") l.out_maps = num();
      else if (key == "M") l.out_rows = num();
      else if (key == "N") l.out_cols = num();
      else if (key == "P") l.kernel_rows = num();
      else if (key == "Q") l.kernel_cols = num();
      else if (key == "stride") l.stride = num();
      else if (key == "pad") l.pad = num();
      else if (key == "activation") l.activation = parse_activation(value, line);
      else if (key == "pool_window") pool_window = num();
      else if (key == "pool_stride") pool_stride = num();
      else bad(line, "unknown layer key '" + key + "'");
    }
    if (!has_kind) bad(line, "layer needs kind=");
    if (l.name.empty()) l.name = "layer" + std::to_string(net.layers.size() + 1);
    if (pool_window > 0 || pool_stride > 0) {
      if (pool_window < 1 || pool_stride < 1) bad(line, "pool_window and pool_stride go together");
      l.pool = PoolSpec{pool_window, pool_stride};
    }
    net.layers.push_back(std::move(l));
  }
  if (!named) throw InvalidConfig("network file has no 'network <name>' line");
  net.validate();
  return net;
}

NetworkDescriptor load_network(const std::string& path) {
  auto f = open(path);
  return parse_network(f);
}

void write_network(std::ostream& out, const NetworkDescriptor& net) {
  out << "network " << net.name << '\n';
  for (const auto& l : net.layers) {
    out << "layer name=" << l.name << " kind=" << to_string(l.kind) << " I=" << l.in_maps << " J=" << l.out_maps;
    if (l.kind != LayerKind::FullyConnected)
      out << " M=" << l.out_rows << " N=" << l.out_cols << " P=" << l.kernel_rows << " Q=" << l.kernel_cols
          << " stride=" << l.stride << " pad=" << l.pad;
    out << " activation=" << to_string(l.activation);
    if (l.pool) out << " pool_window=" << l.pool->window << " pool_stride=" << l.pool->stride;
    out << '\n';
  }
}

namespace {
const char* const kHardwareKeys[] = {"sa_rows",     "sa_cols",          "spm_entries",
                                     "weight_buffer_bytes", "data_buffer_bytes", "dram_bandwidth_bytes_per_s",
                                     "clock_hz",    "bytes_per_element"};
const char* const kCostKeys[] = {"dram", "data_buffer", "weight_buffer", "spm", "mac"};
}  // namespace

HardwareConfig parse_hardware(std::istream& in) {
  HardwareConfig cfg;
  for (const auto& [key, vl] : read_pairs(in, kHardwareKeys, std::size(kHardwareKeys), "hardware")) {
    const auto& [value, line] = vl;
    const auto v = parse_int<std::int64_t>(value, line, key);
    if (key == "sa_rows") cfg.sa_rows = v;
    else if (key == "sa_cols") cfg.sa_cols = v;
    else if (key == "spm_entries") cfg.spm_entries = v;
    else if (key == "weight_buffer_bytes") cfg.weight_buffer_bytes = v;
    else if (key == "data_buffer_bytes") cfg.data_buffer_bytes = v;
    else if (key == "dram_bandwidth_bytes_per_s") cfg.dram_bandwidth_bytes_per_s = v;
    else if (key == "clock_hz") cfg.clock_hz = v;
    else if (key == "bytes_per_element") cfg.bytes_per_element = v;
  }
  cfg.validate();
  return cfg;
}

HardwareConfig load_hardware(const std::string& path) {
  auto f = open(path);
  return parse_hardware(f);
}

void write_hardware(std::ostream& out, const HardwareConfig& cfg) {
  out << "sa_rows = " << cfg.sa_rows << '\n'
      << "sa_cols = " << cfg.sa_cols << '\n'
      << "spm_entries = " << cfg.spm_entries << '\n'
      << "weight_buffer_bytes = " << cfg.weight_buffer_bytes << '\n'
      << "data_buffer_bytes = " << cfg.data_buffer_bytes << '\n'
      << "dram_bandwidth_bytes_per_s = " << cfg.dram_bandwidth_bytes_per_s << '\n'
      << "clock_hz = " << cfg.clock_hz << '\n'
      << "bytes_per_element = " << cfg.bytes_per_element << '\n';
}

EnergyCostTable parse_cost_table(std::istream& in) {
  EnergyCostTable c;
  for (const auto& [key, vl] : read_pairs(in, kCostKeys, std::size(kCostKeys), "cost table")) {
    const double v = parse_double(vl.first, vl.second, key);
    if (key == "dram") c.dram = v;
    else if (key == "data_buffer") c.data_buffer = v;
    else if (key == "weight_buffer") c.weight_buffer = v;
    else if (key == "spm") c.spm = v;
    else if (key == "mac") c.mac = v;
  }
  c.validate();
  return c;
}

EnergyCostTable load_cost_table(const std::string& path) {
  auto f = open(path);
  return parse_cost_table(f);
}

void write_cost_table(std::ostream& out, const EnergyCostTable& c) {
  out << "dram = " << c.dram << '\n'
      << "data_buffer = " << c.data_buffer << '\n'
      << "weight_buffer = " << c.weight_buffer << '\n'
      << "spm = " << c.spm << '\n'
      << "mac = " << c.mac << '\n';
}

NetworkDescriptor resolve_network(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_network(name_or_path);
  return builtin_network(name_or_path);
}

}  // namespace mpna
