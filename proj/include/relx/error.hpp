#pragma once

#include <stdexcept>
#include <string>

namespace relx {

// Base error for pipeline failures: bad input files, invariant violations,
// unresolvable instances. The CLI maps this to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stage has nothing usable to work with (e.g. a relation type without
// positives, or an empty seed set under --strict). CLI exit code 1.
struct DegenerateError : Error {
  using Error::Error;
};

}  // namespace relx
