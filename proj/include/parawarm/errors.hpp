// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace parawarm {

/// Base class for all parawarm errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed problem document (bad JSON, dimension mismatch, unknown sense).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The eigenvector matrix is numerically singular; the matrix is treated as
/// defective. Callers fall back to the Schur or tweaked strategy.
class DefectiveError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular basis, QR non-convergence, iteration limit.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its stated preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace parawarm
