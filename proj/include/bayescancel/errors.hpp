#ifndef BAYESCANCEL_ERRORS_HPP
#define BAYESCANCEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bayescancel {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of a function.
struct DomainError : Error {
  using Error::Error;
};

/// Empty input, or a requested size that the data cannot satisfy.
struct SizeError : Error {
  using Error::Error;
};

/// Dimension mismatch between related objects.
struct ShapeError : Error {
  using Error::Error;
};

/// A required column is missing or the header does not match the schema.
struct SchemaError : Error {
  using Error::Error;
};

/// A cell could not be parsed; names the row and column.
struct ParseError : Error {
  using Error::Error;
};

/// Values that violate a data contract (counts out of range, bad labels, ...).
struct DataError : Error {
  using Error::Error;
};

/// A categorical level not covered by a frozen encoding plan.
struct EncodingError : Error {
  using Error::Error;
};

/// Invalid run configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Sampler initialization or divergence failure.
struct SamplerError : Error {
  using Error::Error;
};

/// Model comparison over mismatched observation sets.
struct CompareError : Error {
  using Error::Error;
};

}  // namespace bayescancel

#endif
