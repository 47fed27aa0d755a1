#pragma once

#include <stdexcept>
#include <string>

namespace spinmem {

// Bad arguments, malformed configs, out-of-contract inputs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical check (truncation tail, unitarity, sector leakage) exceeded its
// tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinmem
