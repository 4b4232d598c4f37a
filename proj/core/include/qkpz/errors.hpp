#pragma once

#include <stdexcept>
#include <string>

namespace qkpz {

// Error taxonomy: SizeError for lattice/capacity violations, IndexError for
// bad site/edge indices, DomainError for parameter ranges (alpha <= 0 etc.),
// ConfigError for malformed run configs, DimensionError for operator algebra
// mismatches, IntegrationError when an integrator exceeds its error budget,
// RangeError for out-of-data queries (fit windows, sample times).

struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

}  // namespace qkpz
