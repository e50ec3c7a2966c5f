#pragma once

#include <stdexcept>
#include <string>

namespace lyz {

// Every failure raised by the library derives from Error so callers can
// catch one type and still branch on the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input documents (JSON, schema violations).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Preconditions on arguments: dimension mismatch, non-positive scalars,
// non-SPD matrices, ill-formed bodies.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Gradient requested on a non-smooth locus.
class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

// Mass or variation requested for a function outside class A.
class NotIntegrable : public Error {
 public:
  using Error::Error;
};

// Data that is valid but degenerate for the requested computation
// (singular moment matrix, vanishing support values, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyz
