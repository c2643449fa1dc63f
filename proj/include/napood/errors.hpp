#pragma once

#include <stdexcept>
#include <string>

namespace napood {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally malformed file: bad magic, version, dtype or encoding.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Byte or element counts that disagree with a declared shape.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input carrying values that violate a data contract
/// (non-finite numbers, negative post-ReLU activations, dimension mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied an argument outside the operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace napood
