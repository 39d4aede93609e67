#pragma once

#include <stdexcept>
#include <string>

namespace sglab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array shapes that do not agree with their measure space or norm config.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or an arithmetic breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An argument outside the range on which a formula or operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A spectral parameter too close to the spectrum of the generator.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

/// An iterative or adaptive procedure hit its cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  /// Error estimate at the point the procedure stopped.
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace sglab
