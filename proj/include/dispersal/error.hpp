#pragma once

#include <stdexcept>
#include <string>

namespace dispersal {

// Caller bug or bad parameter (k out of range, dimension mismatch, bad spec).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kneedle could not find an elbow (constant or non-convex curve).
class NoElbowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerically degenerate input, e.g. an all-zero matrix fed to affinity propagation.
class DegenerateMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dispersal
