#pragma once

#include <stdexcept>

namespace ove {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed arguments: bad thresholds, bad delta, negative samples where
// nonnegative ones are required, invalid configs.
struct InvalidInput : Error {
  using Error::Error;
};

// Out-of-bounds indices or out-of-domain numeric fields.
struct InvalidRange : Error {
  using Error::Error;
};

// Evaluation policy puts mass on an action the behavior policy recorded
// with probability zero.
struct SupportViolation : Error {
  using Error::Error;
};

// Too few trajectories (or samples) for the requested operation.
struct InsufficientData : Error {
  using Error::Error;
};

// A shifted per-trajectory statistic was requested on a trajectory that
// has not been padded to the full horizon.
struct UnpaddedTrajectory : Error {
  using Error::Error;
};

// Exact oracle or enumeration would exceed the configured size limits.
struct IntractableModel : Error {
  using Error::Error;
};

}  // namespace ove
