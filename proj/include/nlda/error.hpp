#pragma once

#include <stdexcept>
#include <string>

namespace nlda {

/// Bad user input: malformed files, invalid configuration, label or
/// vocabulary mismatches. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant (count conservation, impossible states).
/// The CLI maps these to exit code 1.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nlda
