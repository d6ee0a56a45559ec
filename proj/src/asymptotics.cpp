#include "psq/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "psq/errors.hpp"
#include "psq/quadrature.hpp"
#include "psq/specfun.hpp"

namespace psq {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

constexpr double kUnitRhoTolerance = 1e-12;

void require_subcritical(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw RegimeError("expansion requires 0 < rho < 1");
}

void require_supercritical(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw RegimeError("expansion requires rho > 1");
}

void require_index(int j) {
  if (j < 0) throw DomainError("eigenvalue index must be non-negative");
}

void require_capacity(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw DomainError("capacity K must be at least 1");
}

// Coefficients shared by the rho < 1 and rho > 1 (j >= 1) series.
std::vector<ExpansionTerm> coalescing_terms(double rho, double r) {
  const double s = std::sqrt(rho);
  const double gap = (1.0 - s) * (1.0 - s);
  return {{0.0, gap}, {1.0, s}, {4.0 / 3.0, -s * r}, {5.0 / 3.0, 8.0 * s * r * r / 15.0}};
}

double sum_terms(const std::vector<ExpansionTerm>& terms, double k, std::size_t count) {
  double total = 0.0;
  for (std::size_t i = 0; i < count && i < terms.size(); ++i) total += terms[i].coefficient * std::pow(k, -terms[i].power);
  return total;
}

// log(a / (1 - e^{-a})), continuous through a = 0.
double log_a_over_one_minus_exp(double a) {
  if (a == 0.0) return 0.0;
  if (a > 0.0) return std::log(a) - std::log(-std::expm1(-a));
  return std::log(-a) + a - std::log1p(-std::exp(a));
}

// log of  (int_0^inf e^{-eta S/2} Ai(S + r) dS)^2 / ((eta^2/4 - r) Ai(r)^2).
double log_eta_ratio(double eta, double r) {
  const double log_integral = log_weighted_airy_integral(eta, r);
  const double slope = 0.25 * eta * eta - r;
  const double ai_scaled = airy_eval_scaled(r).ai;
  if (!(slope > 0.0) || !(ai_scaled > 0.0)) throw NumericalError("degenerate eta-scale tail prefactor");
  const double log_ai = std::log(ai_scaled) - (r > 0.0 ? 2.0 / 3.0 * r * std::sqrt(r) : 0.0);
  return 2.0 * log_integral - std::log(slope) - 2.0 * log_ai;
}

}  // namespace

std::string Regime::name() const {
  switch (kind) {
    case Kind::Subcritical:
      return "subcritical";
    case Kind::Supercritical:
      return "supercritical";
    case Kind::Critical:
      return "critical";
  }
  return "unknown";
}

Regime classify_regime(double rho, int capacity) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive and finite");
  require_capacity(capacity);
  const double eta = std::pow(static_cast<double>(capacity), 2.0 / 3.0) * (rho - 1.0);
  if (std::fabs(eta) <= kCriticalEtaBand) return Regime::critical(eta);
  return rho < 1.0 ? Regime::subcritical() : Regime::supercritical();
}

double EigenvalueExpansion::value(double capacity, int term_count) const {
  require_capacity(capacity);
  if (term_count < 1 || term_count > max_terms())
    throw DomainError("term count must lie in 1.." + std::to_string(max_terms()));
  return sum_terms(terms, capacity, static_cast<std::size_t>(term_count));
}

EigenvalueExpansion subcritical_expansion(double rho, int j) {
  require_subcritical(rho);
  require_index(j);
  return {Regime::subcritical(), j, coalescing_terms(rho, ai_root(j))};
}

EigenvalueExpansion supercritical_zero_expansion(double rho) {
  require_supercritical(rho);
  const double d = rho - 1.0;
  return {Regime::supercritical(), 0, {{1.0, 1.0}, {2.0, 1.0 / d}, {3.0, 1.0 / (d * d)}}};
}

EigenvalueExpansion supercritical_expansion(double rho, int j) {
  require_supercritical(rho);
  if (j < 1) throw RegimeError("nu_0 for rho > 1 has its own expansion (supercritical_zero_expansion)");
  return {Regime::supercritical(), j, coalescing_terms(rho, ai_root(j - 1))};
}

double critical_first_correction(double eta, double r) {
  const double bracket = -0.3 - 2.0 / 15.0 * eta * r + 2.0 / 15.0 * eta * eta * r * r - 8.0 / 15.0 * r * r * r;
  return 4.0 / (eta * eta - 4.0 * r) * bracket;
}

EigenvalueExpansion critical_expansion(double eta, int j) {
  if (!std::isfinite(eta)) throw DomainError("eta must be finite");
  require_index(j);
  const double r = star_root(eta, j);
  return {Regime::critical(eta),
          j,
          {{1.0, 1.0}, {4.0 / 3.0, 0.25 * eta * eta - r}, {5.0 / 3.0, 0.5 * eta + critical_first_correction(eta, r)}}};
}

double eigenvalue_subcritical(double rho, double capacity, int j, int term_count) {
  return subcritical_expansion(rho, j).value(capacity, term_count);
}

double eigenvalue_supercritical_zero(double rho, double capacity, int term_count) {
  return supercritical_zero_expansion(rho).value(capacity, term_count);
}

double eigenvalue_supercritical(double rho, double capacity, int j, int term_count) {
  return supercritical_expansion(rho, j).value(capacity, term_count);
}

double eigenvalue_critical(double eta, double capacity, int j, bool refined) {
  return critical_expansion(eta, j).value(capacity, refined ? 3 : 2);
}

// --- eigenvectors ----------------------------------------------------------

double s_scale_root(int j, const Regime& regime) {
  require_index(j);
  switch (regime.kind) {
    case Regime::Kind::Subcritical:
      return ai_root(j);
    case Regime::Kind::Supercritical:
      if (j == 0) throw RegimeError("phi_0 for rho > 1 lives on the xi-scale, not the S-scale");
      return ai_root(j - 1);
    case Regime::Kind::Critical:
      return star_root(regime.eta, j);
  }
  throw DomainError("unknown regime");
}

double s_scale_correction(int j, double s, const Regime& regime) {
  const double r = s_scale_root(j, regime);
  const AiryValue a = airy_eval(s + r);
  double slope = s * s / 5.0 - 4.0 * r * s / 15.0;
  if (regime.kind == Regime::Kind::Critical) slope += 8.0 * r * r / 15.0 - critical_first_correction(regime.eta, r);
  return (0.3 * s + 19.0 * r / 30.0) * a.ai + slope * a.ai_prime;
}

double eigvec_s_scale(int j, double s, const Regime& regime, bool correction, double capacity) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("S-scale coordinate must be positive");
  require_capacity(capacity);
  const double r = s_scale_root(j, regime);
  double value = airy_eval(s + r).ai;
  if (correction) value += std::cbrt(1.0 / capacity) * s_scale_correction(j, s, regime);
  return value;
}

double eigvec_l_scale(int j, int l, double rho) {
  require_index(j);
  if (l < 0) throw DomainError("l = K - n must be non-negative");
  if (!(rho > 0.0) || std::fabs(rho - 1.0) < kUnitRhoTolerance)
    throw RegimeError("the l-scale profile is degenerate at rho = 1");
  if (rho > 1.0 && j == 0) throw RegimeError("phi_0 for rho > 1 has no l-scale profile");
  const double s = std::sqrt(rho);
  return l + s / (1.0 - s);
}

double wkb_phase(double xi) { return std::sqrt(xi * (1.0 - xi)) - std::asin(std::sqrt(1.0 - xi)); }

double wkb_phase_correction(double xi, double root) {
  return -0.5 * root * (std::sqrt(xi * (1.0 - xi)) + std::asin(std::sqrt(1.0 - xi)));
}

double wkb_amplitude(double xi) { return std::pow(xi * (1.0 - xi), -0.25); }

double eigvec_xi_scale(int j, double xi, double capacity, const Regime& regime) {
  if (!(xi > 0.0 && xi < 1.0)) throw DomainError("xi must lie in (0, 1)");
  require_capacity(capacity);
  const double r = s_scale_root(j, regime);
  const double exponent = std::sqrt(capacity) * wkb_phase(xi) + std::pow(capacity, 1.0 / 6.0) * wkb_phase_correction(xi, r);
  return std::pow(capacity, -1.0 / 12.0) * wkb_amplitude(xi) * std::exp(exponent);
}

double boundary_scale_quadrature(int n, int nodes, double radius) {
  if (n < 0) throw DomainError("n must be non-negative");
  if (nodes < 1) throw DomainError("node count must be positive");
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("contour radius must lie in (0, 1)");
  // Coefficient extraction: Q(n) = (1/M) sum_k g(z_k) z_k^{-n}.
  double total = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * pi * k / nodes;
    const cplx z = std::polar(radius, theta);
    const cplx w = 1.0 / (1.0 - z);
    const cplx g = std::exp(w) * w;
    total += (g * std::polar(std::pow(radius, -n), -n * theta)).real();
  }
  return total / nodes;
}

double eigvec_boundary_scale(int n) {
  if (n < 0) throw DomainError("n must be non-negative");
  // Small n: the fixed circle |z| = 1/2. Larger n: move towards the saddle
  // near z = 1 - 1/sqrt(n) so that z^{-n} stays moderate, with enough nodes
  // to resolve the faster angular variation there.
  const double radius = std::max(0.5, 1.0 - 1.0 / std::sqrt(n + 1.0));
  const int nodes = std::max(256, 32 * (n + 1));
  return boundary_scale_quadrature(n, nodes, radius);
}

double supercritical_zero_correction(double xi, double rho) {
  const double d3 = std::pow(rho - 1.0, 3);
  return -(3.0 * rho - 1.0) * xi / (2.0 * d3) + (rho * rho - rho + 2.0) / (2.0 * d3 * xi) + 2.0 * rho * std::log(xi) / d3;
}

double eigvec_supercritical_zero_xi(double xi, double rho, double capacity, bool correction) {
  require_supercritical(rho);
  if (!(xi > 0.0 && xi <= 1.0)) throw DomainError("xi must lie in (0, 1]");
  require_capacity(capacity);
  const double alpha = 1.0 / (rho - 1.0);
  double value = std::exp(alpha * (std::log(xi) - xi));
  if (correction) value *= 1.0 + supercritical_zero_correction(xi, rho) / capacity;
  return value;
}

double supercritical_zero_boundary_contour(int n, double rho, double pad_fraction, int nodes) {
  require_supercritical(rho);
  if (n < 0) throw DomainError("n must be non-negative");
  if (!(pad_fraction > 0.0) || nodes < 1) throw DomainError("contour padding and node count must be positive");
  const double alpha = 1.0 / (rho - 1.0);
  const double lo = 1.0 / rho;
  const double center = 0.5 * (lo + 1.0);
  const double half = 0.5 * (1.0 - lo);
  const double tau = std::acosh(1.0 + 2.0 * pad_fraction);
  // R = (z - 1/rho)/(z - 1) is a negative real exactly on (1/rho, 1), so the
  // principal power R^alpha has its cut on the segment the ellipse encloses.
  cplx total = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const cplx arg(2.0 * pi * k / nodes, -tau);
    const cplx z = center + half * std::cos(arg);
    const cplx dz = -half * std::sin(arg);
    const cplx ratio = (z - lo) / (z - 1.0);
    const cplx f = std::exp(alpha * std::log(ratio)) * std::pow(z, n) / (1.0 - z);
    total += f * dz;
  }
  // (1/2 pi i) * (2 pi / M) * sum; the raw loop integral is -q_n.
  const cplx integral = total / (cplx(0.0, 1.0) * static_cast<double>(nodes));
  return -integral.real();
}

double eigvec_supercritical_zero_boundary(int n, double rho) {
  constexpr int kNodes = 512;
  const double a = supercritical_zero_boundary_contour(n, rho, 0.1, kNodes);
  const double b = supercritical_zero_boundary_contour(n, rho, 0.2, kNodes);
  const double scale = std::max(std::fabs(a), std::fabs(b));
  if (!std::isfinite(a) || !std::isfinite(b) || std::fabs(a - b) > 1e-6 * scale)
    throw NumericalError("boundary contour values drift between ellipse sizes at n = " + std::to_string(n));
  return a;
}

double ScaleApprox::operator()(double coordinate) const {
  const bool zero_above = regime.kind == Regime::Kind::Supercritical && index == 0;
  switch (scale) {
    case Scale::S:
      return eigvec_s_scale(index, coordinate, regime, correction, capacity);
    case Scale::L:
      if (coordinate != std::floor(coordinate)) throw DomainError("l must be an integer");
      return eigvec_l_scale(index, static_cast<int>(coordinate), rho);
    case Scale::Xi:
      if (zero_above) return eigvec_supercritical_zero_xi(coordinate, rho, capacity, correction);
      return eigvec_xi_scale(index, coordinate, capacity, regime);
    case Scale::Boundary:
      if (coordinate < 0.0 || coordinate != std::floor(coordinate)) throw DomainError("n must be a non-negative integer");
      if (zero_above) return eigvec_supercritical_zero_boundary(static_cast<int>(coordinate), rho);
      return eigvec_boundary_scale(static_cast<int>(coordinate));
  }
  throw DomainError("unknown scale");
}

MatchingConstants matching_constants(int j, double rho, double capacity, const Regime& regime) {
  require_index(j);
  require_capacity(capacity);
  MatchingConstants m;
  m.k1_over_k0 = 1.0 / (2.0 * std::sqrt(pi));
  if (regime.kind == Regime::Kind::Supercritical) {
    require_supercritical(rho);
    const double alpha = 1.0 / (rho - 1.0);
    m.k0star_over_k1star = std::exp(alpha * std::log(capacity * (1.0 - 1.0 / rho)) - std::lgamma(1.0 + alpha));
    if (j == 0) return m;
  }
  const double r = s_scale_root(j, regime);
  const double k16 = std::pow(capacity, 1.0 / 6.0);
  const double k2_over_k1 =
      2.0 * std::sqrt(pi) / std::sqrt(std::numbers::e) * k16 * std::exp(-0.5 * pi * std::sqrt(capacity) - 0.25 * pi * r * k16);
  m.k2_over_k1 = k2_over_k1;
  m.k2_over_k0 = k2_over_k1 * m.k1_over_k0;
  return m;
}

std::vector<double> predicted_sign_changes(int j, double rho, int capacity, bool correction, std::optional<Regime> regime) {
  require_index(j);
  require_capacity(capacity);
  const Regime reg = regime ? *regime : classify_regime(rho, capacity);
  const double r = s_scale_root(j, reg);
  // Zeros of the leading term on S > 0: Ai zeros above r.
  const int expected = reg.kind == Regime::Kind::Supercritical ? j - 1 : j;
  const double k = capacity;
  auto f = [&](double s) { return eigvec_s_scale(j, s, reg, correction, k); };

  std::vector<double> out;
  // Keep only the first `expected` crossings in S; a truncated two-term
  // series can add spurious far-field zeros that have no exact counterpart.
  const double step = 1e-3;
  const double s_max = std::fabs(r) + 4.0;
  double a = step;
  double fa = f(a);
  while (static_cast<int>(out.size()) < expected && a < s_max) {
    const double b = a + step;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(k - std::pow(k, 2.0 / 3.0) * 0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  if (reg.kind == Regime::Kind::Supercritical) {
    const double s = std::sqrt(rho);
    out.push_back(k - s / (s - 1.0));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- tails -----------------------------------------------------------------

std::string tail_regime_name(TailRegime regime) {
  switch (regime) {
    case TailRegime::RhoBelowOne:
      return "rho_lt_1";
    case TailRegime::BScale:
      return "b_scale";
    case TailRegime::EtaScale:
      return "eta_scale";
    case TailRegime::AScale:
      return "a_scale";
    case TailRegime::RhoAboveOne:
      return "rho_gt_1";
    case TailRegime::Uniform:
      return "uniform";
  }
  return "unknown";
}

double TailApprox::rate() const { return sum_terms(rate_terms, capacity, rate_terms.size()); }

double TailApprox::log_density(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
  return log_prefactor - rate() * t;
}

double TailApprox::density(double t) const { return std::exp(log_density(t)); }

double log_weighted_airy_integral(double eta, double root) {
  if (!std::isfinite(eta) || !std::isfinite(root)) throw DomainError("weighted Airy integral needs finite arguments");
  // Write Ai(x) = Ai_scaled(x) e^{-zeta(x)} and factor out the largest value
  // of the exponent E(s) = -eta s/2 - zeta(s + r), so the integrand stays
  // representable whether the integral is astronomically large or small.
  auto exponent = [eta, root](double s) {
    const double x = s + root;
    return -0.5 * eta * s - (x > 0.0 ? 2.0 / 3.0 * x * std::sqrt(x) : 0.0);
  };
  double shift = exponent(0.0);
  if (root < 0.0) shift = std::max(shift, exponent(-root));
  // Interior maximum where sqrt(x) = -eta/2.
  const double peak = eta < 0.0 ? 0.25 * eta * eta - root : -1.0;
  if (peak > 0.0) shift = std::max(shift, exponent(peak));
  auto integrand = [&](double s) { return airy_eval_scaled(s + root).ai * std::exp(exponent(s) - shift); };
  // Start at the peak: upwards to infinity, then downwards in unit panels
  // until the remaining mass is negligible or S = 0 is reached.
  const double start = std::max(peak, 0.0);
  double value = integrate_to_infinity(integrand, start, 1e-11);
  for (double hi = start; hi > 0.0;) {
    const double lo = std::max(0.0, hi - 1.0);
    const double part = integrate(integrand, lo, hi, 1e-11);
    value += part;
    hi = lo;
    if (std::fabs(part) < 1e-17 * std::fabs(value) && std::fabs(integrand(lo)) < 1e-17) break;
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw NumericalError("weighted Airy integral is not positive");
  return shift + std::log(value);
}

double weighted_airy_integral(double eta, double root) {
  if (!std::isfinite(eta) || !std::isfinite(root)) throw DomainError("weighted Airy integral needs finite arguments");
  auto integrand = [eta, root](double s) {
    const double x = s + root;
    const double zeta = x > 0.0 ? 2.0 / 3.0 * x * std::sqrt(x) : 0.0;
    return airy_eval_scaled(x).ai * std::exp(-0.5 * eta * s - zeta);
  };
  const double value = integrate_to_infinity(integrand, 0.0, 1e-11);
  if (!std::isfinite(value)) throw NumericalError("weighted Airy integral overflowed");
  return value;
}

double b_scale_saddle(double b) { return 4.0 / (b * b + 4.0); }

double b_scale_exponent(double b, double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) throw DomainError("xi must lie in (0, 1]");
  return 0.5 * b * xi + wkb_phase(xi);
}

TailApprox uniform_tail_approx(double eta, int capacity) {
  if (!std::isfinite(eta)) throw DomainError("eta must be finite");
  require_capacity(capacity);
  const double k = capacity;
  const double r = star_root(eta, 0);
  const double a = eta * std::cbrt(k);
  TailApprox tail;
  tail.regime = TailRegime::Uniform;
  tail.parameter = eta;
  tail.capacity = k;
  tail.rate_terms = {{1.0, 1.0}, {4.0 / 3.0, 0.25 * eta * eta - r}};
  // eta e^a/(e^a - 1) = K^{-1/3} a/(1 - e^{-a}).
  tail.log_prefactor = log_eta_ratio(eta, r) - std::log(k) - std::log(k) / 3.0 + log_a_over_one_minus_exp(a);
  return tail;
}

double tail_density_uniform(double eta, int capacity, double t) { return uniform_tail_approx(eta, capacity).density(t); }

TailApprox tail_approx(double rho, int capacity, TailRegime regime) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive and finite");
  require_capacity(capacity);
  const double k = capacity;
  const double log_k = std::log(k);
  TailApprox tail;
  tail.regime = regime;
  tail.capacity = k;

  switch (regime) {
    case TailRegime::RhoBelowOne: {
      require_subcritical(rho);
      const double s = std::sqrt(rho);
      const double r0 = ai_root(0);
      const double q = (1.0 + s) / (1.0 - s);
      const double aip = airy_eval(r0).ai_prime;
      tail.rate_terms = {{0.0, (1.0 - s) * (1.0 - s)}, {1.0, s}, {4.0 / 3.0, -s * r0}};
      tail.log_prefactor = std::log(q) + q - 2.0 * std::log(std::fabs(aip)) - 4.0 / 3.0 * log_k - pi * std::sqrt(k) -
                           0.5 * pi * r0 * std::pow(k, 1.0 / 6.0);
      return tail;
    }
    case TailRegime::BScale: {
      const double b = (rho - 1.0) * std::sqrt(k);
      if (!(b < 0.0)) throw DomainError("the b-scale tail is only available for b < 0");
      tail.parameter = b;
      const double r0 = ai_root(0);
      const double aip = airy_eval(r0).ai_prime;
      const double d = b * b + 4.0;
      const double s = std::asin(std::fabs(b) / std::sqrt(d));
      tail.rate_terms = {{1.0, 1.0 + 0.25 * b * b}, {4.0 / 3.0, -r0}};
      tail.log_prefactor = -5.0 / 6.0 * log_k + std::log(4.0 * std::fabs(b) / d) - 2.0 * std::log(std::fabs(aip)) +
                           2.0 / b * s - (2.0 * b * b + 4.0) / d - 2.0 * s * std::sqrt(k) +
                           std::pow(k, 1.0 / 6.0) * r0 * (2.0 * b / d - s);
      return tail;
    }
    case TailRegime::EtaScale: {
      const double eta = std::pow(k, 2.0 / 3.0) * (rho - 1.0);
      if (eta == 0.0) throw DomainError("eta = 0 has no eta-scale tail; use the a-scale");
      const double r = star_root(eta, 0);
      tail.parameter = eta;
      tail.rate_terms = {{1.0, 1.0}, {4.0 / 3.0, 0.25 * eta * eta - r}};
      tail.log_prefactor = std::log(std::fabs(eta)) - log_k + log_eta_ratio(eta, r);
      if (eta < 0.0) tail.log_prefactor += eta * std::cbrt(k);
      return tail;
    }
    case TailRegime::AScale: {
      const double a = k * (rho - 1.0);
      const double r = star_root(0.0, 0);
      tail.parameter = a;
      tail.rate_terms = {{1.0, 1.0}, {4.0 / 3.0, std::fabs(r)}};
      tail.log_prefactor = log_a_over_one_minus_exp(a) + log_eta_ratio(0.0, r) - 4.0 / 3.0 * log_k;
      return tail;
    }
    case TailRegime::RhoAboveOne:
      require_supercritical(rho);
      tail.rate_terms = {{1.0, 1.0}};
      tail.log_prefactor = -log_k;
      return tail;
    case TailRegime::Uniform:
      return uniform_tail_approx(std::pow(k, 2.0 / 3.0) * (rho - 1.0), capacity);
  }
  throw DomainError("unknown tail regime");
}

double tail_density(double rho, int capacity, double t, TailRegime regime) {
  return tail_approx(rho, capacity, regime).density(t);
}

}  // namespace psq
