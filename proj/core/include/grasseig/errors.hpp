#pragma once

#include <stdexcept>
#include <string>

namespace grasseig {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad header, non-square matrix, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A matrix declared or expected symmetric is not.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Problem too large (index overflow, dense oracle cap).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tangent vector or point pair left the injectivity domain of Exp/Log.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Rank collapse in a QR factorization (retraction, subspace iteration).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Spectral gap is zero; the dominant subspace is not unique.
class DegenerateGapError : public Error {
 public:
  using Error::Error;
};

/// Step-size sequence violated its floor (gamma_k < mu/2).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace grasseig
