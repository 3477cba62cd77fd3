#pragma once

#include <stdexcept>
#include <string>

namespace monolab {

/// Malformed input: wrong dimensions, out-of-range indices, unnormalized
/// distributions and the like.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scenario or problem exceeds the configured size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A precondition of a theorem-level check does not hold (e.g. a
/// signalling behavior handed to a monogamy check).
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace monolab
