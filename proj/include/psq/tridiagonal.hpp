#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace psq {

// A vector stored componentwise as sign * exp(log_abs); sign 0 marks an exact zero.
struct LogVector {
  std::vector<double> log_abs;
  std::vector<signed char> sign;

  double component(std::size_t i) const { return sign[i] == 0 ? 0.0 : sign[i] * std::exp(log_abs[i]); }
};

struct SymmetricEigenpairs {
  std::vector<double> values;      // ascending
  std::vector<LogVector> vectors;  // vectors[j] has unit 2-norm and pairs with values[j]
};

// Full eigendecomposition of the symmetric tridiagonal matrix with diagonal
// `diag` (length n) and off-diagonal `off` (length n-1). Eigenvalues come
// from Sturm-count bisection, eigenvectors from twisted factorizations.
// Components are accurate relative to their own size, not only to the
// vector norm, which matters for the strongly graded vectors of this model.
SymmetricEigenpairs solve_symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off);

// Number of eigenvalues strictly below x.
int sturm_count(std::span<const double> diag, std::span<const double> off, double x);

}  // namespace psq
