#pragma once

#include <stdexcept>
#include <string>

namespace sdnabr {

// Malformed or invariant-violating input: catalog, trace, scenario, run
// config or parameter block. The message names the offending field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transfer could not complete before the end of the bandwidth trace.
class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdnabr
