#include "psq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psq/errors.hpp"
#include "psq/tridiagonal.hpp"

namespace psq {

namespace {

constexpr double kUnitRhoTolerance = 1e-12;

void check_state(const Spectrum& s, int n) {
  if (n < 0 || n >= s.size()) throw DomainError("state index " + std::to_string(n) + " outside 0..K-1");
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
}

}  // namespace

QueueParams::QueueParams(double rho, int capacity) : rho_(rho), capacity_(capacity) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive and finite");
  if (capacity < 1) throw DomainError("capacity K must be at least 1");
}

double QueueParams::eta() const { return std::pow(static_cast<double>(capacity_), 2.0 / 3.0) * (rho_ - 1.0); }

TridiagonalGenerator build_generator(const QueueParams& params) {
  const int k = params.capacity();
  const double rho = params.rho();
  TridiagonalGenerator g;
  g.diag.assign(k, -(1.0 + rho));
  g.diag[k - 1] = -1.0;
  g.super.assign(k - 1, rho);
  g.sub.resize(k - 1);
  for (int n = 0; n + 1 < k; ++n) g.sub[n] = static_cast<double>(n + 1) / (n + 2);
  return g;
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

SignedLog signed_log_sum(std::span<const SignedLog> terms) {
  double top = -INFINITY;
  for (const auto& t : terms)
    if (t.sign != 0) top = std::max(top, t.log_abs);
  if (top == -INFINITY) return {};
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += t.sign * std::exp(t.log_abs - top);
  if (acc == 0.0) return {};
  return {top + std::log(std::fabs(acc)), acc > 0.0 ? 1 : -1};
}

Spectrum::Spectrum(QueueParams params, std::vector<double> eigenvalues, std::vector<LogVector> symmetric_vectors)
    : params_(params), eigenvalues_(std::move(eigenvalues)), log_vectors_(std::move(symmetric_vectors)) {
  vectors_.reserve(log_vectors_.size());
  for (const auto& v : log_vectors_) {
    std::vector<double> dense(v.log_abs.size());
    for (std::size_t n = 0; n < dense.size(); ++n) dense[n] = v.component(n);
    vectors_.push_back(std::move(dense));
  }
}

SignedLog Spectrum::log_symmetric_component(int j, int n) const {
  const LogVector& v = log_vectors_.at(j);
  const auto i = static_cast<std::size_t>(n);
  if (i >= v.sign.size()) throw DomainError("state index " + std::to_string(n) + " outside 0..K-1");
  if (v.sign[i] == 0) return {};
  return {v.log_abs[i], v.sign[i]};
}

double Spectrum::log_weight(int n) const { return n * std::log(params_.rho()) + std::log1p(static_cast<double>(n)); }

double Spectrum::phi(int j, int n) const { return log_phi(j, n).value(); }

SignedLog Spectrum::log_phi(int j, int n) const {
  check_state(*this, n);
  SignedLog u = log_symmetric_component(j, n);
  if (u.sign != 0) u.log_abs -= 0.5 * log_weight(n);
  return u;
}

double Spectrum::symmetrized(int j, int n) const {
  check_state(*this, n);
  return symmetric_component(j, n) / std::sqrt(n + 1.0);
}

std::vector<double> Spectrum::symmetrized_vector(int j) const {
  std::vector<double> out(size());
  for (int n = 0; n < size(); ++n) out[n] = symmetrized(j, n);
  return out;
}

Spectrum eigen_decompose(const QueueParams& params) {
  const int k = params.capacity();
  const double rho = params.rho();
  // -D B D^{-1} with D = diag(sqrt(rho^n (n+1))) is symmetric.
  std::vector<double> diag(k, 1.0 + rho);
  diag[k - 1] = 1.0;
  std::vector<double> off(k - 1);
  for (int n = 0; n + 1 < k; ++n) off[n] = -std::sqrt(rho * (n + 1.0) / (n + 2.0));

  SymmetricEigenpairs eig = solve_symmetric_tridiagonal(diag, off);
  for (auto& v : eig.vectors)
    if (v.sign.back() < 0)
      for (auto& sg : v.sign) sg = static_cast<signed char>(-sg);
  return Spectrum(params, std::move(eig.values), std::move(eig.vectors));
}

ExpansionCoefficients expansion_coefficients(const Spectrum& spectrum) {
  // With unit weighted norm, c_j = sum_n rho^n phi_j(n) = sum_n rho^{n/2} u_j(n) / sqrt(n+1).
  const int k = spectrum.size();
  const double half_log_rho = 0.5 * std::log(spectrum.params().rho());
  std::vector<SignedLog> c(k);
  std::vector<SignedLog> terms(k);
  for (int j = 0; j < k; ++j) {
    for (int n = 0; n < k; ++n) {
      SignedLog t = spectrum.log_symmetric_component(j, n);
      if (t.sign != 0) t.log_abs += n * half_log_rho - 0.5 * std::log1p(static_cast<double>(n));
      terms[n] = t;
    }
    c[j] = signed_log_sum(terms);
  }
  return ExpansionCoefficients(std::move(c));
}

double conditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, int n, double t) {
  check_state(spectrum, n);
  check_time(t);
  const int k = spectrum.size();
  std::vector<SignedLog> terms(k);
  for (int j = 0; j < k; ++j) {
    const SignedLog& c = coeffs.log_value(j);
    const SignedLog phi = spectrum.log_phi(j, n);
    if (c.sign == 0 || phi.sign == 0) continue;
    terms[j] = {c.log_abs + phi.log_abs - spectrum.eigenvalue(j) * t, c.sign * phi.sign};
  }
  return signed_log_sum(terms).value();
}

double log_arrival_partition(const QueueParams& params) {
  const double rho = params.rho();
  const double k = params.capacity();
  if (std::fabs(rho - 1.0) < kUnitRhoTolerance) return std::log(k);
  const double l = std::log(rho);
  if (l < 0.0) return std::log(-std::expm1(k * l)) - std::log(-std::expm1(l));
  return k * l + std::log(-std::expm1(-k * l)) - std::log(std::expm1(l));
}

std::vector<double> stationary_arrival_distribution(const QueueParams& params) {
  const int k = params.capacity();
  const double log_z = log_arrival_partition(params);
  const double l = std::log(params.rho());
  std::vector<double> pi(k);
  if (std::fabs(params.rho() - 1.0) < kUnitRhoTolerance) {
    std::fill(pi.begin(), pi.end(), 1.0 / k);
    return pi;
  }
  double total = 0.0;
  for (int n = 0; n < k; ++n) total += pi[n] = std::exp(n * l - log_z);
  for (double& p : pi) p /= total;
  return pi;
}

double log_unconditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t) {
  check_time(t);
  const double log_z = log_arrival_partition(spectrum.params());
  std::vector<SignedLog> terms(spectrum.size());
  for (int j = 0; j < spectrum.size(); ++j) {
    const SignedLog& c = coeffs.log_value(j);
    if (c.sign == 0) continue;
    terms[j] = {2.0 * c.log_abs - log_z - spectrum.eigenvalue(j) * t, 1};
  }
  return signed_log_sum(terms).log_abs;
}

double unconditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t) {
  return std::exp(log_unconditional_density(spectrum, coeffs, t));
}

double unconditional_survival(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t) {
  check_time(t);
  const double log_z = log_arrival_partition(spectrum.params());
  std::vector<SignedLog> terms(spectrum.size());
  for (int j = 0; j < spectrum.size(); ++j) {
    const SignedLog& c = coeffs.log_value(j);
    if (c.sign == 0) continue;
    const double nu = spectrum.eigenvalue(j);
    terms[j] = {2.0 * c.log_abs - log_z - std::log(nu) - nu * t, 1};
  }
  return signed_log_sum(terms).value();
}

std::vector<int> sign_change_intervals(const Spectrum& spectrum, int j) {
  std::vector<int> out;
  for (int n = 0; n + 1 < spectrum.size(); ++n) {
    const int a = spectrum.log_symmetric_component(j, n).sign;
    const int b = spectrum.log_symmetric_component(j, n + 1).sign;
    if (a * b < 0) out.push_back(n);
  }
  return out;
}

DominantTail dominant_tail(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, std::optional<int> state) {
  DominantTail tail;
  tail.rate = spectrum.eigenvalue(0);
  const SignedLog& c0 = coeffs.log_value(0);
  if (state) {
    const SignedLog phi = spectrum.log_phi(0, *state);
    tail.log_prefactor = c0.log_abs + phi.log_abs;
    tail.prefactor = c0.sign * phi.sign * std::exp(tail.log_prefactor);
  } else {
    // c_0 sum_n phi_0(n) pi_n = c_0^2 / Z.
    tail.log_prefactor = 2.0 * c0.log_abs - log_arrival_partition(spectrum.params());
    tail.prefactor = std::exp(tail.log_prefactor);
  }
  return tail;
}

}  // namespace psq
