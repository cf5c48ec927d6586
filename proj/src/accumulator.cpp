#include "mpna/accumulator.hpp"

#include <string>

#include "mpna/error.hpp"

namespace mpna {

AccumulatorBank::AccumulatorBank(Index sub_units, Index spm_entries) {
  if (sub_units < 1 || spm_entries < 1) throw InvalidConfig("accumulator bank needs at least one entry");
  spm_ = Matrix<Accum>::Zero(spm_entries, sub_units);
}

void AccumulatorBank::check(Index column, Index address) const {
  if (column < 0 || column >= sub_units())
    throw AddressOverflow("accumulator sub-unit " + std::to_string(column) + " out of range (" +
                          std::to_string(sub_units()) + " sub-units)");
  if (address < 0 || address >= spm_entries())
    throw AddressOverflow("SPM address " + std::to_string(address) + " exceeds " +
                          std::to_string(spm_entries()) + " entries");
}

void AccumulatorBank::accumulate(Index column, Index address, Accum partial) {
  check(column, address);
  spm_(address, column) += partial;
  ++accumulations_;
}

Accum AccumulatorBank::value(Index column, Index address) const {
  check(column, address);
  return spm_(address, column);
}

Accum AccumulatorBank::drain(Index column, Index address) {
  check(column, address);
  const Accum v = spm_(address, column);
  spm_(address, column) = 0;
  return v;
}

}  // namespace mpna
