#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace mvcca {

// Error taxonomy; the CLI maps these onto exit codes (2 usage, 3 data, 4 numeric).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments or violated preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed files: bad magic, truncation, unparsable CSV, unsupported audio.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input carrying invalid data (NaN/Inf entries, missing files,
// inconsistent labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// I/O failure while reading or writing.
class PersistenceError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, divergence, loss of positive
// definiteness.
class NumericError : public Error {
 public:
  using Error::Error;
};

inline void warn(const std::string& msg) {
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

}  // namespace mvcca
