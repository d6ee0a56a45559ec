#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "psq/tridiagonal.hpp"

namespace psq {

// Traffic intensity rho = lambda/mu (mu = 1) and capacity K of the M/M/1/K-PS queue.
class QueueParams {
 public:
  QueueParams(double rho, int capacity);

  double rho() const { return rho_; }
  int capacity() const { return capacity_; }
  // Critical-scaling parameter eta = K^{2/3} (rho - 1).
  double eta() const;

 private:
  double rho_;
  int capacity_;
};

// The K x K matrix B of p'(t) = B p(t), stored by diagonals.
struct TridiagonalGenerator {
  std::vector<double> diag;   // B[n][n]
  std::vector<double> super;  // B[n][n+1]
  std::vector<double> sub;    // B[n+1][n]
};

TridiagonalGenerator build_generator(const QueueParams& params);

// A real number held as sign * exp(log_abs); used where rho^n factors
// overflow or underflow a double.
struct SignedLog {
  double log_abs = -INFINITY;
  int sign = 0;

  double value() const;
};

// Sum of signed log-magnitudes without leaving log space.
SignedLog signed_log_sum(std::span<const SignedLog> terms);

// Eigen-structure of -B. Eigenvalues nu_0 < nu_1 < ... are the decay rates;
// eigenvectors phi_j are normalized so that
//   sum_n rho^n (n+1) phi_i(n) phi_j(n) = delta_ij,   phi_j(K-1) > 0.
// Internally the orthonormal vectors u_j = sqrt(w) phi_j of the symmetrized
// matrix are stored; phi itself is reconstructed on demand.
class Spectrum {
 public:
  Spectrum(QueueParams params, std::vector<double> eigenvalues, std::vector<LogVector> symmetric_vectors);

  const QueueParams& params() const { return params_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }

  double eigenvalue(int j) const { return eigenvalues_.at(j); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  // log w_n = n log rho + log(n+1).
  double log_weight(int n) const;

  // u_j(n): component of the unit eigenvector of the symmetrized matrix.
  double symmetric_component(int j, int n) const { return vectors_.at(j).at(n); }
  std::span<const double> symmetric_vector(int j) const { return vectors_.at(j); }
  // log |u_j(n)| and its sign, accurate even where u_j(n) underflows.
  SignedLog log_symmetric_component(int j, int n) const;

  // phi_j(n) = u_j(n) / sqrt(w_n). May under/overflow for extreme rho, K.
  double phi(int j, int n) const;
  SignedLog log_phi(int j, int n) const;

  // rho^{n/2} phi_j(n) = u_j(n) / sqrt(n+1), the quantity plotted against n.
  double symmetrized(int j, int n) const;
  std::vector<double> symmetrized_vector(int j) const;

 private:
  QueueParams params_;
  std::vector<double> eigenvalues_;
  std::vector<LogVector> log_vectors_;
  std::vector<std::vector<double>> vectors_;
};

Spectrum eigen_decompose(const QueueParams& params);

// Coefficients c_j of 1/(n+1) = sum_j c_j phi_j(n), kept in log form.
class ExpansionCoefficients {
 public:
  explicit ExpansionCoefficients(std::vector<SignedLog> c) : c_(std::move(c)) {}

  int size() const { return static_cast<int>(c_.size()); }
  double value(int j) const { return c_.at(j).value(); }
  const SignedLog& log_value(int j) const { return c_.at(j); }

 private:
  std::vector<SignedLog> c_;
};

ExpansionCoefficients expansion_coefficients(const Spectrum& spectrum);

// p_n(t): density of the sojourn time given n other customers at arrival.
double conditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, int n, double t);

// log of sum_{m<K} rho^m, the normalizer of the arrival-state distribution.
double log_arrival_partition(const QueueParams& params);

// Pr[N(0-) = n] = (1 - rho) rho^n / (1 - rho^K), n = 0..K-1.
std::vector<double> stationary_arrival_distribution(const QueueParams& params);

// p(t) = sum_n p_n(t) Pr[N(0-) = n] and its logarithm. Every spectral term
// is c_j^2 / Z exp(-nu_j t) >= 0, so the log form never cancels.
double unconditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t);
double log_unconditional_density(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t);

// Pr[V > t] for the unconditional sojourn time.
double unconditional_survival(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, double t);

// Indices n at which rho^{n/2} phi_j changes sign between n and n+1.
std::vector<int> sign_change_intervals(const Spectrum& spectrum, int j);

// One-eigenvalue tail: p_n(t) or p(t) ~ prefactor * exp(-rate t).
struct DominantTail {
  double rate = 0.0;
  double prefactor = 0.0;
  double log_prefactor = 0.0;
};

// `state` selects p_n; std::nullopt selects the unconditional p.
DominantTail dominant_tail(const Spectrum& spectrum, const ExpansionCoefficients& coeffs, std::optional<int> state = std::nullopt);

}  // namespace psq
