#pragma once

#include <stdexcept>
#include <string>

#include "prony/types.hpp"

namespace prony {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, out-of-range values, bad files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Requested problem does not fit into addressable memory.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation (e.g. log 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap. Carries what was computed so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, int partial_rank,
                   RealVector partial_sigma = {})
      : Error(what),
        iterations_(iterations),
        partial_rank_(partial_rank),
        partial_sigma_(std::move(partial_sigma)) {}

  int iterations() const noexcept { return iterations_; }
  int partial_rank() const noexcept { return partial_rank_; }
  const RealVector& partial_sigma() const noexcept { return partial_sigma_; }

 private:
  int iterations_;
  int partial_rank_;
  RealVector partial_sigma_;
};

/// Block power method found no drop inside the starting block; raise r0.
class RankOverflowError : public Error {
 public:
  RankOverflowError(const std::string& what, int r0) : Error(what), r0_(r0) {}
  int r0() const noexcept { return r0_; }

 private:
  int r0_;
};

/// Smallest retained singular value is too small to scale by.
class SingularScaleError : public Error {
 public:
  using Error::Error;
};

/// Eigenvector matrix is numerically singular; redraw mu.
class SingularBasisError : public Error {
 public:
  using Error::Error;
};

/// Least-squares matrix is numerically rank deficient (node recovery failed).
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Detected rank is zero: nothing to recover.
class EmptyModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace prony
