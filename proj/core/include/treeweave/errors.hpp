#pragma once

#include <stdexcept>
#include <string>

namespace treeweave {

/// Base class for all treeweave errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments or object state was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input exceeds a hard size cap of an exact algorithm.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its budget; carries the best residual seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// A simulation scenario cannot continue (e.g. population would go extinct).
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace treeweave
