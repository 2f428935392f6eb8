#pragma once

#include <stdexcept>
#include <string>

namespace studentrisk {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad CSV cells, schema violations, out-of-range options.
/// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical or statistical failure while fitting or evaluating a model.
/// The CLI maps these to exit code 1.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace studentrisk
