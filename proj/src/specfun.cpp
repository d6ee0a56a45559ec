#include "psq/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "psq/errors.hpp"

namespace psq {

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;   // Ai(0)
constexpr long double kMAip0 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
constexpr long double kSqrt3 = 1.732050807568877293527446341505872367L;

constexpr double kSeriesLimitNeg = 8.0;  // Maclaurin for -8 <= x
constexpr double kSeriesLimitPos = 3.0;  // Ai, Ai' by Maclaurin for x <= 3
constexpr double kBiSeriesLimit = 8.0;   // Bi, Bi' by Maclaurin for x <= 8

struct Raw {
  long double ai, aip, bi, bip;
};

// Maclaurin series in extended precision. Ai = c1 f - c2 g,
// Bi = sqrt(3) (c1 f + c2 g).
Raw maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  long double f = 1.0L, fp = 0.0L, g = x, gp = 1.0L;
  long double tf = 1.0L, tfp = x * x / 2.0L, tg = x, tgp = 1.0L;
  fp = tfp;
  for (int k = 0; k < 200; ++k) {
    const long double a = 3.0L * k;
    tf *= x3 / ((a + 2.0L) * (a + 3.0L));
    tfp *= x3 / ((a + 3.0L) * (a + 5.0L));
    tg *= x3 / ((a + 3.0L) * (a + 4.0L));
    tgp *= x3 / ((a + 1.0L) * (a + 3.0L));
    f += tf;
    fp += tfp;
    g += tg;
    gp += tgp;
    const long double scale = std::max({std::fabs(f), std::fabs(g), std::fabs(fp), std::fabs(gp)});
    const long double last = std::max({std::fabs(tf), std::fabs(tg), std::fabs(tfp), std::fabs(tgp)});
    if (last <= 1e-21L * scale) break;
  }
  Raw r{};
  r.ai = kAi0 * f - kMAip0 * g;
  r.aip = kAi0 * fp - kMAip0 * gp;
  r.bi = kSqrt3 * (kAi0 * f + kMAip0 * g);
  r.bip = kSqrt3 * (kAi0 * fp + kMAip0 * gp);
  return r;
}

// exp(z) K_nu(z) by the trapezoidal rule on int_0^inf exp(-z(cosh t - 1)) cosh(nu t) dt.
// The integrand is analytic in |Im t| < pi/2, so the rule converges geometrically.
double scaled_bessel_k(double nu, double z) {
  // The integrand narrows like 1/sqrt(z); keep several nodes across it.
  const double h = std::min(0.1, 0.25 / std::sqrt(z));
  double sum = 0.5;
  for (int k = 1; k < 2000; ++k) {
    const double t = k * h;
    const double term = std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(nu * t);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return h * sum;
}

// Coefficients u_k of the large-argument Airy expansions; v_k = -(6k+1)/(6k-1) u_k.
struct AsymCoeffs {
  static constexpr int kCount = 40;
  double u[kCount];
  double v[kCount];
  constexpr AsymCoeffs() : u{}, v{} {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kCount; ++k) {
      u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
      v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
    }
  }
};
constexpr AsymCoeffs kCoeffs{};

// Sums sum_k s_k c_k zeta^{-k} for the given index parity, stopping at the smallest term.
// sign_flip alternates every second retained term as in the oscillatory expansions.
double asym_sum(const double* c, double zeta, int start, int stride, bool alternate) {
  double sum = 0.0;
  double prev = INFINITY;
  int sign = 1;
  for (int k = start; k < AsymCoeffs::kCount; k += stride) {
    const double term = c[k] * std::pow(zeta, -k);
    if (std::fabs(term) > prev) break;
    sum += sign * term;
    prev = std::fabs(term);
    if (prev < 1e-17 * std::fabs(sum)) break;
    if (alternate) sign = -sign;
  }
  return sum;
}

// x <= -8: modulus/phase form.
AiryValue asymptotic_negative(double x) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double theta = zeta - std::numbers::pi / 4.0;
  const double s = std::sin(theta), c = std::cos(theta);
  const double p = asym_sum(kCoeffs.u, zeta, 0, 2, true);
  const double q = asym_sum(kCoeffs.u, zeta, 1, 2, true);
  const double pv = asym_sum(kCoeffs.v, zeta, 0, 2, true);
  const double qv = asym_sum(kCoeffs.v, zeta, 1, 2, true);
  const double z4 = std::pow(z, 0.25);
  const double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  AiryValue out;
  out.x = x;
  out.ai = inv_sqrt_pi / z4 * (c * p + s * q);
  out.bi = inv_sqrt_pi / z4 * (-s * p + c * q);
  out.ai_prime = inv_sqrt_pi * z4 * (s * pv - c * qv);
  out.bi_prime = inv_sqrt_pi * z4 * (c * pv + s * qv);
  return out;
}

void check_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("airy_eval: non-finite argument");
}

// Core evaluator; `scaled` applies exp(+-zeta) factors for x > 0.
AiryValue evaluate(double x, bool scaled) {
  check_finite(x);
  if (x < -kSeriesLimitNeg) return asymptotic_negative(x);

  AiryValue out;
  out.x = x;
  if (x <= 0.0) {
    const Raw r = maclaurin(x);
    out.ai = static_cast<double>(r.ai);
    out.ai_prime = static_cast<double>(r.aip);
    out.bi = static_cast<double>(r.bi);
    out.bi_prime = static_cast<double>(r.bip);
    return out;
  }

  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double up = scaled ? std::exp(zeta) : 1.0;    // applied to Ai, Ai'
  const double down = scaled ? std::exp(-zeta) : 1.0;  // applied to Bi, Bi'

  if (x <= kSeriesLimitPos) {
    const Raw r = maclaurin(x);
    out.ai = static_cast<double>(r.ai) * up;
    out.ai_prime = static_cast<double>(r.aip) * up;
    out.bi = static_cast<double>(r.bi) * down;
    out.bi_prime = static_cast<double>(r.bip) * down;
    return out;
  }

  // Ai = sqrt(x/3)/pi K_{1/3}(zeta), Ai' = -x/(pi sqrt 3) K_{2/3}(zeta).
  const double decay = scaled ? 1.0 : std::exp(-zeta);
  out.ai = std::sqrt(x / 3.0) / std::numbers::pi * scaled_bessel_k(1.0 / 3.0, zeta) * decay;
  out.ai_prime = -x / (std::numbers::pi * std::numbers::sqrt3) * scaled_bessel_k(2.0 / 3.0, zeta) * decay;

  if (x <= kBiSeriesLimit) {
    const Raw r = maclaurin(x);
    out.bi = static_cast<double>(r.bi) * down;
    out.bi_prime = static_cast<double>(r.bip) * down;
  } else {
    const double grow = scaled ? 1.0 : std::exp(zeta);
    const double x4 = std::pow(x, 0.25);
    out.bi = std::numbers::inv_sqrtpi / x4 * asym_sum(kCoeffs.u, zeta, 0, 1, false) * grow;
    out.bi_prime = std::numbers::inv_sqrtpi * x4 * asym_sum(kCoeffs.v, zeta, 0, 1, false) * grow;
  }
  return out;
}

// Safeguarded Newton on a sign-changing bracket [lo, hi]. `fdf` returns (f, f').
template <typename F>
double safeguarded_newton(F fdf, double lo, double hi, double x0) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("root bracket does not change sign");
  // Orient so that f(a) < 0 < f(b).
  double a = flo < 0.0 ? lo : hi;
  double b = flo < 0.0 ? hi : lo;
  double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
  double dx_old = std::fabs(hi - lo);
  double dx = dx_old;
  auto [f, df] = fdf(x);
  for (int it = 0; it < 200; ++it) {
    const bool newton_out = ((x - b) * df - f) * ((x - a) * df - f) > 0.0;
    const bool too_slow = std::fabs(2.0 * f) > std::fabs(dx_old * df);
    dx_old = dx;
    if (newton_out || too_slow || df == 0.0) {
      dx = 0.5 * (b - a);
      x = a + dx;
    } else {
      dx = f / df;
      x -= dx;
    }
    if (std::fabs(dx) <= 4e-16 * std::max(1.0, std::fabs(x))) return x;
    std::tie(f, df) = fdf(x);
    if (f == 0.0) return x;
    if (f < 0.0) a = x;
    else b = x;
  }
  throw NumericalError("safeguarded Newton did not converge");
}

// Classical estimate -T(3 pi (4j+3)/8) for the j-th zero of Ai.
double ai_root_estimate(int j) {
  const double t = 3.0 * std::numbers::pi * (4.0 * j + 3.0) / 8.0;
  return -std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
}

}  // namespace

AiryValue airy_eval(double x) { return evaluate(x, false); }

AiryValue airy_eval_scaled(double x) { return evaluate(x, true); }

double ai_root(int j) {
  if (j < 0) throw DomainError("ai_root: negative index");
  const double est = ai_root_estimate(j);
  const double hi = j == 0 ? -1.0 : 0.5 * (est + ai_root_estimate(j - 1));
  const double lo = 0.5 * (est + ai_root_estimate(j + 1));
  auto fdf = [](double r) {
    const AiryValue v = airy_eval(r);
    return std::pair{v.ai, v.ai_prime};
  };
  return safeguarded_newton(fdf, lo, hi, est);
}

std::vector<AiryRoot> ai_roots(int count) {
  if (count < 1) throw DomainError("ai_roots: count must be positive");
  std::vector<AiryRoot> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) out.push_back({j, ai_root(j)});
  return out;
}

double star_residual(double eta, double r) {
  const AiryValue v = airy_eval(r);
  return v.ai_prime + 0.5 * eta * v.ai;
}

double star_root(double eta, int j) {
  if (!std::isfinite(eta)) throw DomainError("star_root: non-finite eta");
  if (j < 0) throw DomainError("star_root: negative index");
  // g(r) = Ai'(r) + (eta/2) Ai(r), g'(r) = r Ai(r) + (eta/2) Ai'(r). The scaled
  // evaluation shares one positive factor, so signs and g/g' are unchanged.
  auto fdf = [eta](double r) {
    const AiryValue v = airy_eval_scaled(r);
    return std::pair{v.ai_prime + 0.5 * eta * v.ai, r * v.ai + 0.5 * eta * v.ai_prime};
  };
  const double lo = ai_root(j);
  const double hi = j == 0 ? std::max(0.0, 0.25 * eta * eta + 1.0) : ai_root(j - 1);
  double guess = 0.5 * (lo + hi);
  if (j == 0 && eta > 2.0) guess = 0.25 * eta * eta - 1.0 / eta;
  return safeguarded_newton(fdf, lo, hi, guess);
}

std::vector<StarRoot> star_roots(double eta, int count) {
  if (count < 1) throw DomainError("star_roots: count must be positive");
  std::vector<StarRoot> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) out.push_back({j, eta, star_root(eta, j)});
  return out;
}

}  // namespace psq
