#pragma once

#include <optional>
#include <string>
#include <vector>

namespace psq {

// Large-K traffic regime. Critical carries eta = K^{2/3} (rho - 1).
struct Regime {
  enum class Kind { Subcritical, Supercritical, Critical };

  Kind kind = Kind::Subcritical;
  double eta = 0.0;

  static Regime subcritical() { return {Kind::Subcritical, 0.0}; }
  static Regime supercritical() { return {Kind::Supercritical, 0.0}; }
  static Regime critical(double eta) { return {Kind::Critical, eta}; }

  std::string name() const;
};

// |eta| above which the sub/supercritical expansions are preferred.
inline constexpr double kCriticalEtaBand = 3.0;

// Critical when |K^{2/3}(rho - 1)| <= kCriticalEtaBand, otherwise by the sign of rho - 1.
Regime classify_regime(double rho, int capacity);

// --- eigenvalues -----------------------------------------------------------

// coefficient * K^{-power}
struct ExpansionTerm {
  double power = 0.0;
  double coefficient = 0.0;
};

// Partial sums of an eigenvalue series in increasing powers of 1/K.
struct EigenvalueExpansion {
  Regime regime;
  int index = 0;
  std::vector<ExpansionTerm> terms;

  int max_terms() const { return static_cast<int>(terms.size()); }
  // Sum of the first term_count terms; DomainError outside 1..max_terms().
  double value(double capacity, int term_count) const;
};

// rho < 1: (1-sqrt rho)^2 + sqrt(rho)/K - sqrt(rho) r_j/K^{4/3} + (8 sqrt(rho)/15) r_j^2/K^{5/3}.
EigenvalueExpansion subcritical_expansion(double rho, int j);
// rho > 1, j = 0: 1/K + 1/((rho-1)K^2) + 1/((rho-1)^2 K^3).
EigenvalueExpansion supercritical_zero_expansion(double rho);
// rho > 1, j >= 1: subcritical form with r_{j-1}.
EigenvalueExpansion supercritical_expansion(double rho, int j);
// rho = 1 + eta K^{-2/3}: 1/K + (eta^2/4 - r_j*)/K^{4/3} [+ (eta/2 + nu1_j)/K^{5/3}].
EigenvalueExpansion critical_expansion(double eta, int j);

double eigenvalue_subcritical(double rho, double capacity, int j, int term_count);
double eigenvalue_supercritical_zero(double rho, double capacity, int term_count);
double eigenvalue_supercritical(double rho, double capacity, int j, int term_count);
double eigenvalue_critical(double eta, double capacity, int j, bool refined);

// Solvability correction nu~(1)_j of the critical regime; tends to 8 r_j^2/15 as eta -> -inf.
double critical_first_correction(double eta, double star_root);

// --- eigenvectors ----------------------------------------------------------

// Airy shift r used on the S-scale: r_j, r_{j-1} (rho > 1, j >= 1) or r_j*(eta).
double s_scale_root(int j, const Regime& regime);

// Phi^(1)(S): first correction on the S-scale.
double s_scale_correction(int j, double s, const Regime& regime);

// rho^{n/2} phi_j(n) on n = K - K^{2/3} S, with k_0 = 1:
// Ai(S + r) [+ K^{-1/3} Phi^(1)(S)].
double eigvec_s_scale(int j, double s, const Regime& regime, bool correction, double capacity);

// Linear profile l + sqrt(rho)/(1 - sqrt(rho)) on l = K - n (the factor
// k_0 K^{-2/3} Ai'(r) is dropped).
double eigvec_l_scale(int j, int l, double rho);

// WKB phase psi(xi) = sqrt(xi(1-xi)) - asin(sqrt(1-xi)).
double wkb_phase(double xi);
// psi^(1)(xi) = -(r/2) [sqrt(xi(1-xi)) + asin(sqrt(1-xi))].
double wkb_phase_correction(double xi, double root);
// L(xi) = [xi(1-xi)]^{-1/4}.
double wkb_amplitude(double xi);

// rho^{n/2} phi_j(n) on xi = n/K with k_1 = 1.
double eigvec_xi_scale(int j, double xi, double capacity, const Regime& regime);

// Q(n): n-th Taylor coefficient of exp(1/(1-z))/(1-z), k_2 = 1.
double eigvec_boundary_scale(int n);
// Q(n) by the periodic trapezoidal rule with `nodes` points on |z| = radius.
double boundary_scale_quadrature(int n, int nodes, double radius);

// rho > 1, j = 0 on the xi-scale with k_0* = 1:
// xi^{1/(rho-1)} exp(-xi/(rho-1)) [1 + phibar(xi)/K].
double eigvec_supercritical_zero_xi(double xi, double rho, double capacity, bool correction);
double supercritical_zero_correction(double xi, double rho);

// rho > 1, j = 0 for n = O(1), normalized so that q_0 = 1 (k_1* = 1).
// Evaluated on two Bernstein ellipses around the cut [1/rho, 1]; throws
// NumericalError if they disagree by more than 1e-6 relative.
double eigvec_supercritical_zero_boundary(int n, double rho);
// Single-contour value; pad_fraction is the ellipse overshoot as a fraction of the cut length.
double supercritical_zero_boundary_contour(int n, double rho, double pad_fraction, int nodes);

// Which spatial scale a ScaleApprox evaluates on.
enum class Scale { S, L, Xi, Boundary };

// One asymptotic eigenvector approximation bound to its parameters.
struct ScaleApprox {
  Scale scale = Scale::S;
  int index = 0;
  Regime regime;
  bool correction = false;
  double rho = 1.0;
  double capacity = 1.0;

  // Coordinate is S, l, xi or n according to `scale`.
  double operator()(double coordinate) const;
};

// Ratios between the generic constants of neighbouring scales.
struct MatchingConstants {
  double k1_over_k0 = 0.0;
  std::optional<double> k2_over_k1;
  std::optional<double> k2_over_k0;
  std::optional<double> k0star_over_k1star;
};

MatchingConstants matching_constants(int j, double rho, double capacity, const Regime& regime);

// Predicted sign-change locations n of phi_j at capacity K, ascending.
// S-scale zeros are mapped through n = K - K^{2/3} S; for rho > 1 the
// l-scale zero n = K - sqrt(rho)/(sqrt(rho) - 1) is added.
std::vector<double> predicted_sign_changes(int j, double rho, int capacity, bool correction,
                                           std::optional<Regime> regime = std::nullopt);

// --- tails of the unconditional density -----------------------------------

enum class TailRegime { RhoBelowOne, BScale, EtaScale, AScale, RhoAboveOne, Uniform };

std::string tail_regime_name(TailRegime regime);

// p(t) ~ exp(log_prefactor - rate t). `parameter` is b, eta or a for the
// scaled regimes (derived from rho and K).
struct TailApprox {
  TailRegime regime = TailRegime::RhoBelowOne;
  double parameter = 0.0;
  double capacity = 1.0;
  std::vector<ExpansionTerm> rate_terms;
  double log_prefactor = 0.0;

  double rate() const;
  double log_density(double t) const;
  double density(double t) const;
};

TailApprox tail_approx(double rho, int capacity, TailRegime regime);
double tail_density(double rho, int capacity, double t, TailRegime regime);

// Uniform approximation in eta, valid across the critical band and into rho > 1.
TailApprox uniform_tail_approx(double eta, int capacity);
double tail_density_uniform(double eta, int capacity, double t);

// int_0^inf exp(-eta S/2) Ai(S + r) dS, and its logarithm for integrals that
// are known to be positive (r = r_0*(eta)) and may leave double range.
double weighted_airy_integral(double eta, double root);
double log_weighted_airy_integral(double eta, double root);

// Laplace-method internals of the b-scale: f(xi) = (b/2) xi + psi(xi) and its saddle 4/(b^2+4).
double b_scale_exponent(double b, double xi);
double b_scale_saddle(double b);

}  // namespace psq
