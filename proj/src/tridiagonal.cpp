#include "psq/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psq/errors.hpp"

namespace psq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

int count_below(std::span<const double> diag, std::span<const double> off_sq, double x, double pivmin) {
  int count = 0;
  double q = diag[0] - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    q = diag[i] - x - off_sq[i - 1] / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// Eigenvector for the eigenvalue lam from a twisted factorization
// T - lam I = N_r D_r N_r^T. Every component is a product of pivot ratios,
// so it is accumulated in log form and keeps its relative accuracy even when
// it is hundreds of orders of magnitude below the largest one.
LogVector twisted_vector(std::span<const double> diag, std::span<const double> off, std::span<const double> off_sq, double lam,
                         double pivmin) {
  const std::size_t n = diag.size();
  auto guard = [pivmin](double x) { return std::fabs(x) < pivmin ? -pivmin : x; };
  std::vector<double> down(n), up(n);
  down[0] = guard(diag[0] - lam);
  for (std::size_t i = 1; i < n; ++i) down[i] = guard(diag[i] - lam - off_sq[i - 1] / down[i - 1]);
  up[n - 1] = guard(diag[n - 1] - lam);
  for (std::size_t i = n - 1; i-- > 0;) up[i] = guard(diag[i] - lam - off_sq[i] / up[i + 1]);

  // Twist where the diagonal of the inverse is largest.
  std::size_t r = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = std::fabs(down[i] + up[i] - (diag[i] - lam));
    if (gamma < best) {
      best = gamma;
      r = i;
    }
  }

  LogVector v;
  v.log_abs.assign(n, 0.0);
  v.sign.assign(n, 1);
  for (std::size_t i = r; i-- > 0;) {
    const double f = -off[i] / down[i];
    v.log_abs[i] = v.log_abs[i + 1] + std::log(std::fabs(f));
    v.sign[i] = static_cast<signed char>(f < 0.0 ? -v.sign[i + 1] : v.sign[i + 1]);
  }
  for (std::size_t i = r + 1; i < n; ++i) {
    const double f = -off[i - 1] / up[i];
    v.log_abs[i] = v.log_abs[i - 1] + std::log(std::fabs(f));
    v.sign[i] = static_cast<signed char>(f < 0.0 ? -v.sign[i - 1] : v.sign[i - 1]);
  }
  const double top = *std::max_element(v.log_abs.begin(), v.log_abs.end());
  double acc = 0.0;
  for (double x : v.log_abs) acc += std::exp(2.0 * (x - top));
  const double log_norm = top + 0.5 * std::log(acc);
  for (double& x : v.log_abs) x -= log_norm;
  return v;
}

}  // namespace

int sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
  std::vector<double> off_sq(off.size());
  for (std::size_t i = 0; i < off.size(); ++i) off_sq[i] = off[i] * off[i];
  return count_below(diag, off_sq, x, std::numeric_limits<double>::min());
}

SymmetricEigenpairs solve_symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off) {
  const std::size_t n = diag.size();
  if (n == 0 || off.size() + 1 != n) throw DomainError("solve_symmetric_tridiagonal: inconsistent sizes");

  std::vector<double> off_sq(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) off_sq[i] = off[i] * off[i];

  // Gershgorin interval.
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(off[i - 1]) : 0.0) + (i + 1 < n ? std::fabs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double norm = std::max(std::fabs(lo), std::fabs(hi));
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, norm * norm);
  lo -= 2.0 * kEps * norm + pivmin;
  hi += 2.0 * kEps * norm + pivmin;

  SymmetricEigenpairs out;
  out.values.resize(n);

  // Bisection for each index k: find x with count(x) <= k < count(x').
  // Lower bound of the next eigenvalue starts at the previous one.
  double left = lo;
  for (std::size_t k = 0; k < n; ++k) {
    double a = left, b = hi;
    while (b - a > 2.0 * kEps * std::max(std::fabs(a), std::fabs(b)) + pivmin) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(diag, off_sq, mid, pivmin) <= static_cast<int>(k)) a = mid;
      else b = mid;
    }
    out.values[k] = 0.5 * (a + b);
    left = a;
  }

  out.vectors.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.vectors.push_back(twisted_vector(diag, off, off_sq, out.values[k], pivmin));
  return out;
}

}  // namespace psq
