#pragma once

#include <stdexcept>
#include <string>

namespace swefinn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

/// Invalid argument domain: division by exact zero, negative sqrt, bad slice.
class DomainError : public Error {
public:
  using Error::Error;
};

class NonFiniteError : public Error {
public:
  using Error::Error;
};

/// Total water column H + eta reached a non-positive value.
class DryingError : public Error {
public:
  using Error::Error;
};

/// Blow-up guard: |eta| exceeded the instability threshold.
class InstabilityError : public Error {
public:
  using Error::Error;
};

/// Malformed binary container (bad magic, version, truncation, counts).
class FormatError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace swefinn
