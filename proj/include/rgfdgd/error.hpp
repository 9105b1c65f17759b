#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rgfdgd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, malformed input, or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A cost evaluation returned NaN or infinity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Iterates blew up during a run.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t iteration)
      : Error(what), iteration_(iteration) {}

  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

}  // namespace rgfdgd
