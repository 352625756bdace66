#pragma once

#include <stdexcept>
#include <string>

namespace conslab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative method hits its cap or diverges.
struct ConvergenceError : Error {
  using Error::Error;
};

}  // namespace conslab
