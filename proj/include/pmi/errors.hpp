#pragma once

#include <stdexcept>
#include <string>

namespace pmi {

/// Base of every exception thrown by the library. The C API maps each
/// subclass onto one pmi_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Relaxation order below the minimum, or a multiplier degree that would be
/// negative.
class DegreeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Degenerate simplex, empty section and similar bad bounding-set geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmi
