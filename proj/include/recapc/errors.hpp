#pragma once

#include <stdexcept>

namespace recapc {

/// Base class for every recoverable error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input documents: bad JSON, bad CSV, unknown keys.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally parseable input that violates a model requirement
/// (dimension mismatch, probability out of range, prior not summing to 1).
struct ValidationError : Error {
  using Error::Error;
};

/// The instance admits unbounded expected session length: some category is
/// liked with probability 1 by a type that has positive prior mass.
struct InfiniteWelfareError : ValidationError {
  using ValidationError::ValidationError;
};

/// A posterior update was requested for an observation whose probability
/// underflows; there is no defensible belief to return.
struct ZeroLikelihoodError : Error {
  using Error::Error;
};

struct BudgetError : Error {
  using Error::Error;
};

/// Branch-and-bound exceeded its optional node cap.
struct NodeBudgetExceededError : BudgetError {
  using BudgetError::BudgetError;
};

/// The horizon dynamic program would need more states than allowed.
struct StateBudgetExceededError : BudgetError {
  using BudgetError::BudgetError;
};

/// A simulated session survived past the hard round cap.
struct RoundCapExceededError : BudgetError {
  using BudgetError::BudgetError;
};

/// The tail-truncation horizon overflows (worst like-probability too close
/// to 1 for the requested accuracy).
struct HorizonOverflowError : Error {
  using Error::Error;
};

/// Convergence detection exhausted its round budget without the
/// recommendation stabilizing.
struct NotConvergedError : Error {
  using Error::Error;
};

/// Co-clustering produced (or was given) a cluster with no members.
struct EmptyClusterError : Error {
  using Error::Error;
};

}  // namespace recapc
