#pragma once

#include <stdexcept>
#include <string>

namespace mcdt {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial enumeration would exceed the supported size.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The covariance is on the boundary of positive definiteness.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A root-finder could not bracket or converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Solved constants violate a structural requirement (e.g. monotonicity).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A construction was requested outside the hypotheses that justify it.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcdt
