#pragma once

#include <stdexcept>
#include <string>

namespace ffsc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A byte stream is truncated, corrupted, or was produced under a different model.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A symbol, or a (source, reconstruction) pair, has zero probability under the model in use.
class ZeroProbability : public Error {
 public:
  using Error::Error;
};

/// A side-sequence provider or source buffer ran out of samples.
class SourceExhausted : public Error {
 public:
  using Error::Error;
};

/// The decoder asked for a true source sample it is not yet allowed to see.
class CausalityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ffsc
