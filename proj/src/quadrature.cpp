#include "psq/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "psq/errors.hpp"

namespace psq {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 15>::integrate(f, a, b, 20, rel_tol);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol) {
  double total = 0.0;
  double peak = 0.0;
  double x = a;
  for (int panel = 0; panel < 10000; ++panel) {
    const double part = integrate(f, x, x + 1.0, rel_tol);
    total += part;
    x += 1.0;
    peak = std::max(peak, std::fabs(f(x)));
    for (double s : {0.25, 0.5, 0.75}) peak = std::max(peak, std::fabs(f(x - s)));
    const double tail = std::fabs(f(x));
    if (peak > 0.0 && tail < 1e-16 * peak && std::fabs(part) <= 1e-16 * std::fabs(total)) return total;
    if (peak == 0.0 && panel > 50) return total;
  }
  throw NumericalError("integrate_to_infinity: integrand did not decay");
}

}  // namespace psq
