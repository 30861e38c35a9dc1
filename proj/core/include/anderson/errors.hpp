#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace anderson {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The potential law violates its invariants (degenerate support, bad nodes).
class InvalidDistribution : public Error {
public:
  using Error::Error;
};

/// A site index or index range is outside the available potential.
class IndexError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// An explicit cover does not contain its target set.
class CoverageError : public Error {
public:
  using Error::Error;
};

/// Iterative numerics failed. Carries the offending eigenvalue index and,
/// when known, the (seed, stream) of the realization that produced it.
class NumericError : public Error {
public:
  NumericError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

  bool has_origin() const noexcept { return has_origin_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  NumericError with_origin(std::uint64_t seed, std::uint64_t stream) const {
    NumericError e = *this;
    e.has_origin_ = true;
    e.seed_ = seed;
    e.stream_ = stream;
    return e;
  }

private:
  std::size_t index_ = 0;
  bool has_origin_ = false;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

}  // namespace anderson
