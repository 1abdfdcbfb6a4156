#pragma once

#include <stdexcept>
#include <string>

namespace cirsim {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent configuration (bad JSON, missing fields,
// horizon not a multiple of the step, tau off the grid, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

// Model assumptions failed and the run did not opt into allow_invalid.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation: " + what) {}
};

// Mark sampling was requested from the no-jumps measure.
class SamplingFromEmptyMeasure : public Error {
 public:
  SamplingFromEmptyMeasure() : Error("cannot sample a mark from the no-jumps measure") {}
};

// A Gaussian increment was requested over a nonpositive time step.
class NonpositiveStep : public Error {
 public:
  explicit NonpositiveStep(double dt)
      : Error("gaussian increment requires dt > 0, got dt = " + std::to_string(dt)) {}
};

// A time passed to a grid lookup does not lie on the grid.
class OffGridQuery : public Error {
 public:
  explicit OffGridQuery(const std::string& what) : Error("off-grid query: " + what) {}
};

// A delayed lookup fell outside the supplied history segment.
class DelayBufferUnderflow : public Error {
 public:
  explicit DelayBufferUnderflow(const std::string& what)
      : Error("delay buffer underflow: " + what) {}
};

// An estimator was asked to aggregate an empty path set.
class EmptyPathSet : public Error {
 public:
  explicit EmptyPathSet(const std::string& what) : Error("empty path set: " + what) {}
};

// The delta process has no analytically known limit value nu.
class UnknownNu : public Error {
 public:
  explicit UnknownNu(const std::string& what) : Error("unknown nu: " + what) {}
};

// Filesystem-level failure while writing or reading run artifacts.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io: " + what) {}
};

}  // namespace cirsim
