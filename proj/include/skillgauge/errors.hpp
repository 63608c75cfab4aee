#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skillgauge {

// Base class for everything this library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unrecognized file content (bad JSON, bad token, unknown class).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid file with the wrong shape (wrong PGM maxval, dimension
// mismatch against the sequence metadata).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input violating a domain invariant (inverted box, empty
// sequence, mismatched lengths, missing path).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Label not permitted by the active task profile.
class ProfileError : public Error {
 public:
  using Error::Error;
};

// Missing frame indices in a depth sequence directory.
class GapError : public Error {
 public:
  GapError(const std::string& msg, std::vector<int> missing_indices)
      : Error(msg), missing(std::move(missing_indices)) {}
  std::vector<int> missing;
};

// Deprojection asked for a pixel with no depth return.
class InvalidDepth : public Error {
 public:
  using Error::Error;
};

// An operation that needs at least one element got none.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Statistics cannot be computed (zero variance across both groups).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace skillgauge
