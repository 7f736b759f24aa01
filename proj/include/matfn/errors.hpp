#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace matfn {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input violates an existence condition or a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The computation itself failed (iteration budget, tolerance breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StructureInconsistent : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ChainFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BudgetExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A result was computed but fails its own residual contract.
class ResidualExceeded : public NumericalError {
 public:
  ResidualExceeded(const std::string& what, double residual, double limit)
      : NumericalError(what + ": residual " + std::to_string(residual) + " exceeds " +
                       std::to_string(limit)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class Singular : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotUnipotent : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NegativeEigenvalue : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// One group of identical Jordan blocks J_r(alpha), alpha < 0, occurring `count` times.
struct BlockCount {
  double eigenvalue = 0.0;
  std::size_t size = 0;
  std::size_t count = 0;

  friend bool operator==(const BlockCount&, const BlockCount&) = default;
};

std::string describe_blocks(const std::vector<BlockCount>& blocks);

class ParityViolation : public PreconditionError {
 public:
  explicit ParityViolation(std::vector<BlockCount> offending)
      : PreconditionError("odd number of identical negative-eigenvalue Jordan blocks: " +
                          describe_blocks(offending)),
        offending_(std::move(offending)) {}
  const std::vector<BlockCount>& offending() const noexcept { return offending_; }

 private:
  std::vector<BlockCount> offending_;
};

}  // namespace matfn
