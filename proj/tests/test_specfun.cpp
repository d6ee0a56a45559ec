#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "psq/errors.hpp"
#include "psq/specfun.hpp"

using namespace psq;

TEST_SUITE("specfun") {
  TEST_CASE("closed forms at the origin") {
    // Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
    const double ai0 = std::pow(3.0, -2.0 / 3.0) / boost::math::tgamma(2.0 / 3.0);
    const double aip0 = -std::pow(3.0, -1.0 / 3.0) / boost::math::tgamma(1.0 / 3.0);
    const AiryValue a = airy_eval(0.0);
    CHECK(a.ai == doctest::Approx(ai0).epsilon(1e-15));
    CHECK(a.ai_prime == doctest::Approx(aip0).epsilon(1e-15));
    CHECK(std::fabs(a.ai - 0.3550280539) < 1e-10);
    CHECK(std::fabs(a.ai_prime + 0.2588194038) < 1e-10);
    CHECK(a.ai * a.bi_prime - a.ai_prime * a.bi == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  }

  TEST_CASE("agrees with an independent Airy implementation") {
    double worst_abs = 0.0, worst_rel_decay = 0.0, worst_rel_growth = 0.0;
    for (double x = -60.0; x <= 60.0; x += 0.0173) {
      const AiryValue a = airy_eval(x);
      const double ai = boost::math::airy_ai(x), aip = boost::math::airy_ai_prime(x);
      const double bi = boost::math::airy_bi(x), bip = boost::math::airy_bi_prime(x);
      if (std::fabs(x) <= 10.0) {
        worst_abs = std::max({worst_abs, std::fabs(a.ai - ai), std::fabs(a.ai_prime - aip)});
        worst_abs = std::max({worst_abs, std::fabs(a.bi - bi) / std::max(1.0, std::fabs(bi)),
                              std::fabs(a.bi_prime - bip) / std::max(1.0, std::fabs(bip))});
      }
      if (x > 0.0) {
        worst_rel_decay = std::max({worst_rel_decay, std::fabs(a.ai / ai - 1.0), std::fabs(a.ai_prime / aip - 1.0)});
        worst_rel_growth = std::max({worst_rel_growth, std::fabs(a.bi / bi - 1.0), std::fabs(a.bi_prime / bip - 1.0)});
      } else {
        // Oscillatory side: absolute error relative to the |x|^{-1/4} and |x|^{1/4} envelopes.
        const double env = std::pow(std::max(1.0, -x), 0.25);
        worst_rel_growth = std::max({worst_rel_growth, std::fabs(a.ai - ai) * env, std::fabs(a.bi - bi) * env,
                                     std::fabs(a.ai_prime - aip) / env, std::fabs(a.bi_prime - bip) / env});
      }
    }
    CHECK(worst_abs < 1e-12);
    CHECK(worst_rel_decay < 1e-10);
    CHECK(worst_rel_growth < 1e-10);
  }

  TEST_CASE("Wronskian across the supported range") {
    for (double x = -10.0; x <= 10.0; x += 0.01) {
      const AiryValue a = airy_eval(x);
      const double w = a.ai * a.bi_prime - a.ai_prime * a.bi;
      CHECK(std::fabs(w * std::numbers::pi - 1.0) < 1e-12);
    }
  }

  TEST_CASE("Airy equation by finite differences") {
    const double h = 1e-3;
    for (double x : {-7.3, -2.0, 0.4, 3.1, 6.6}) {
      const double second = (airy_eval(x + h).ai - 2.0 * airy_eval(x).ai + airy_eval(x - h).ai) / (h * h);
      CHECK(second == doctest::Approx(x * airy_eval(x).ai).epsilon(1e-5));
    }
  }

  TEST_CASE("scaled evaluation") {
    for (double x : {0.5, 4.0, 20.0, 60.0}) {
      const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
      const AiryValue s = airy_eval_scaled(x);
      const AiryValue a = airy_eval(x);
      CHECK(s.ai * std::exp(-zeta) == doctest::Approx(a.ai).epsilon(1e-13));
      CHECK(s.bi * std::exp(zeta) == doctest::Approx(a.bi).epsilon(1e-13));
    }
    CHECK(airy_eval_scaled(300.0).ai > 0.0);
    CHECK(airy_eval_scaled(-3.0).ai == airy_eval(-3.0).ai);
  }

  TEST_CASE("non-finite arguments are rejected") {
    CHECK_THROWS_AS(airy_eval(NAN), DomainError);
    CHECK_THROWS_AS(airy_eval(INFINITY), DomainError);
  }

  TEST_CASE("zeros of Ai") {
    CHECK(std::fabs(ai_root(0) + 2.338) < 5e-4);
    const auto roots = ai_roots(10);
    REQUIRE(roots.size() == 10);
    CHECK(roots[0].value - roots[1].value == doctest::Approx(1.7498).epsilon(1e-4));
    const auto reference = oracle::airy_zeros_by_bisection(10);
    for (int j = 0; j < 10; ++j) {
      CHECK(roots[j].index == j);
      CHECK(std::fabs(airy_eval(roots[j].value).ai) < 1e-12);
      CHECK(std::fabs(roots[j].value - reference[j]) < 1e-10);
      if (j > 0) CHECK(roots[j].value < roots[j - 1].value);
    }
    CHECK(std::fabs(airy_eval(-2.338107410459767).ai) < 1e-12);
  }

  TEST_CASE("star roots at eta = 0 are the zeros of Ai'") {
    const auto r = star_roots(0.0, 3);
    CHECK(std::fabs(r[0].value + 1.019) < 5e-4);
    CHECK(std::fabs(r[1].value + 3.248) < 5e-4);
    CHECK(std::fabs(r[2].value + 4.820) < 5e-4);
    for (const auto& s : r) CHECK(std::fabs(airy_eval(s.value).ai_prime) < 1e-12);
  }

  TEST_CASE("star roots in the limits eta -> -inf and eta -> +inf") {
    // Ai'(r) + (eta/2) Ai(r) = 0 moves the zero by about -2/eta.
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(star_root(-40.0, j) - ai_root(j) - 0.05) < 1e-3);
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(star_root(-4000.0, j) - ai_root(j)) < 1e-3);
    const double eta = 40.0;
    CHECK(std::fabs(star_root(eta, 0) - (eta * eta / 4.0 - 1.0 / eta)) < 1e-2);
  }

  TEST_CASE("star root residuals, interlacing and monotone branches") {
    for (int i = 0; i <= 40; ++i) {
      const double eta = -10.0 + 0.5 * i;
      const auto roots = star_roots(eta, 6);
      for (const auto& s : roots) {
        const AiryValue a = airy_eval(s.value);
        const double scale = std::max({1.0, std::fabs(a.ai_prime), std::fabs(eta * a.ai)});
        CHECK(std::fabs(star_residual(eta, s.value)) < 1e-12 * scale);
      }
      CHECK(roots[0].value > ai_root(0));
      for (int j = 1; j <= 5; ++j) {
        CHECK(ai_root(j - 1) > roots[j].value);
        CHECK(roots[j].value > ai_root(j));
        CHECK(roots[j].value < 0.0);
      }
      if (i > 0) {
        const auto prev = star_roots(eta - 0.5, 6);
        for (int j = 0; j < 6; ++j) CHECK(roots[j].value > prev[j].value);
      }
    }
  }

  TEST_CASE("r_0* changes sign at eta = -2 Ai'(0)/Ai(0)") {
    const AiryValue a = airy_eval(0.0);
    const double eta0 = -2.0 * a.ai_prime / a.ai;
    CHECK(eta0 == doctest::Approx(1.458).epsilon(1e-3));
    CHECK(star_root(eta0 - 0.01, 0) < 0.0);
    CHECK(star_root(eta0 + 0.01, 0) > 0.0);
  }

  TEST_CASE("Airy integral identities") {
    using boost::math::quadrature::gauss_kronrod;
    for (int j = 0; j < 4; ++j) {
      const double r = ai_root(j);
      const double aip = airy_eval(r).ai_prime;
      auto sq = [r](double s) { double a = boost::math::airy_ai(s + r); return a * a; };
      auto s2 = [r](double s) { double a = boost::math::airy_ai(s + r); return s * s * a * a; };
      const double i0 = gauss_kronrod<double, 31>::integrate(sq, 0.0, 40.0, 20, 1e-13);
      const double i2 = gauss_kronrod<double, 31>::integrate(s2, 0.0, 40.0, 20, 1e-13);
      CHECK(std::fabs(i0 - aip * aip) < 1e-8);
      CHECK(std::fabs(i2 - 8.0 / 15.0 * r * r * aip * aip) < 1e-8);
    }
  }
}
