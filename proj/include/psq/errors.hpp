#pragma once

#include <stdexcept>
#include <string>

namespace psq {

// Argument outside the domain of an operation (bad state index, K = 0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Operation called for a traffic regime it does not cover.
class RegimeError : public DomainError {
 public:
  explicit RegimeError(const std::string& what) : DomainError(what) {}
};

// An internal numerical self-check failed (contour drift, no convergence).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Not enough simulated samples to form the requested estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace psq
