#pragma once

#include <stdexcept>
#include <string>

namespace mhr {

// Malformed or out-of-contract input. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The data do not support the requested statistic (empty stratum, no events
// before the truncation time, zero survival at a query point, ...). The CLI
// maps this to exit code 3.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A query point lies outside the domain where a fitted object is defined.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace mhr
