#pragma once

#include <stdexcept>
#include <string>

namespace mpna {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation is undefined for this layer kind (e.g. MAC count of a pooling layer).
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// Tensor or tile dimensions do not agree with the descriptor or the array.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// A descriptor, configuration or file violates its invariants.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// No tiling satisfies the buffer, SPM and multiplicity constraints.
class PlanInfeasible : public Error {
 public:
  using Error::Error;
};

/// SA-FC weight stream could not deliver a weight set when it was scheduled.
class StreamUnderrun : public Error {
 public:
  using Error::Error;
};

/// Accumulator address outside the SPM. Always a planning bug.
class AddressOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace mpna
