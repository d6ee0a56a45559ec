#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psq/asymptotics.hpp"
#include "psq/spectral.hpp"

namespace psq {

// A numeric cell with its full value and the string a printed table shows.
struct ReportCell {
  std::string name;
  double value = 0.0;
  std::string printed;
};

struct ReportRow {
  double rho = 0.0;
  int capacity = 0;
  std::optional<int> j;
  std::optional<double> t;  // +inf marks the t -> infinity limit row
  std::vector<ReportCell> cells;

  // Throws DomainError if no cell has this name.
  const ReportCell& cell(const std::string& name) const;
};

struct ReportTable {
  std::string title;
  std::vector<ReportRow> rows;
};

// Fixed-point with `decimals` digits, as in the eigenvalue columns.
std::string format_fixed(double value, int decimals);
// Mantissa with two decimals and a two-digit exponent, e.g. 1.75E-01.
std::string format_scientific(double value);
// Relative-error style of the tail table: percent above 5e-4, scientific
// below, and "<E-12" under 1e-12.
std::string format_tail_error(double relative_error);

double relative_error(double approx, double exact);

// nu_0 at rho = 0.25: exact and 2/3/4-term values, K in {10,30,50,70,100}.
ReportTable table1();
// rho = 4: nu_0 exact/3-term and nu_1 exact/4-term.
ReportTable table2();
// rho = 0.25, K in {10,20}: -log p(t)/t exact and from the one-eigenvalue tail.
ReportTable table3();

// Columns rho,K,j,t then <cell>,<cell>_printed for each cell.
void write_table_csv(std::ostream& out, const ReportTable& table);

// JSON dump of eigenvalues and the symmetrized orthonormal eigenvectors.
// count < 0 dumps all K pairs.
std::string spectrum_json(const Spectrum& spectrum, int count = -1);

// Branches r_j*(eta), j = 0..3, eta in [-6, 6] step 0.05: eta,j,r_star.
void write_root_branches_csv(std::ostream& out);

struct FigureCase {
  double rho = 0.0;
  int j = 0;
};

// The six (rho, j) eigenvector plots at K = 100.
std::vector<FigureCase> figure_cases();

// rho,j,n,symmetrized for every figure case.
void write_eigenvector_figures_csv(std::ostream& out, int capacity = 100);

struct SignChangeReport {
  double rho = 0.0;
  int j = 0;
  int capacity = 0;
  std::vector<int> exact;  // n with a sign change between n and n+1
  std::vector<double> one_term;
  std::vector<double> two_term;
};

std::vector<SignChangeReport> sign_change_report(int capacity = 100);
// rho,j,K,kind,n with kind in {exact,one_term,two_term}; exact rows give the lower n.
void write_sign_change_csv(std::ostream& out, const std::vector<SignChangeReport>& report);

// Exact p(t) alongside the one-eigenvalue tail and an asymptotic display.
// Errors are relative errors of -log p/t (of p itself at t = 0).
struct TailRow {
  double t = 0.0;
  double exact = 0.0;
  double dominant = 0.0;
  double dominant_error = 0.0;
  double asymptotic = 0.0;
  double asymptotic_error = 0.0;
};

std::vector<TailRow> tail_comparison(double rho, int capacity, const std::vector<double>& times, TailRegime regime);
void write_tail_csv(std::ostream& out, const std::vector<TailRow>& rows, TailRegime regime);

// Tail display that matches a large-K regime: rho_lt_1, uniform (critical) or rho_gt_1.
TailRegime default_tail_regime(const Regime& regime);

}  // namespace psq
