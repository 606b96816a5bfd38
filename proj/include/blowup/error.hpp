#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Raised for precondition violations on forests and blow-up states
/// (unknown vertex, non-edge, illegal blow-down, malformed input).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blowup
