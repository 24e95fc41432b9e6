#pragma once

#include <stdexcept>
#include <string>

namespace fbl {

// Bad input: dimension mismatches, malformed descriptors, violated
// preconditions. The CLI maps these to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not produce a result (infeasible LP, budget
// exhausted, ...). The CLI maps these to exit status 3.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbl
