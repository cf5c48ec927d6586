#include "mpna/hardware.hpp"

#include "mpna/error.hpp"

namespace mpna {

std::int64_t HardwareConfig::dram_cycles(std::int64_t bytes) const {
  if (bytes <= 0) return 0;
  __extension__ const __int128 num = static_cast<__int128>(bytes) * clock_hz;
  return static_cast<std::int64_t>((num + dram_bandwidth_bytes_per_s - 1) / dram_bandwidth_bytes_per_s);
}

void HardwareConfig::validate() const {
  auto positive = [](auto v, const char* name) {
    if (v <= 0) throw InvalidConfig(std::string("hardware: ") + name + " must be > 0");
  };
  positive(sa_rows, "sa_rows");
  positive(sa_cols, "sa_cols");
  positive(spm_entries, "spm_entries");
  positive(weight_buffer_bytes, "weight_buffer_bytes");
  positive(data_buffer_bytes, "data_buffer_bytes");
  positive(dram_bandwidth_bytes_per_s, "dram_bandwidth_bytes_per_s");
  positive(clock_hz, "clock_hz");
  positive(bytes_per_element, "bytes_per_element");
}

}  // namespace mpna
