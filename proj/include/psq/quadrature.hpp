#pragma once

#include <functional>

namespace psq {

// Adaptive Gauss-Kronrod (15-point) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

// Integral of a function that decays to zero as x -> infinity, accumulated in
// unit panels from `a` until the integrand has fallen below 1e-16 of the
// largest magnitude seen and the last panel no longer changes the sum.
double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol = 1e-12);

}  // namespace psq
