#include "psq/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "psq/errors.hpp"
#include "psq/specfun.hpp"

namespace psq {

namespace {

const std::vector<int> kTableCapacities = {10, 30, 50, 70, 100};

ReportCell make_cell(std::string name, double value, std::string printed) {
  return {std::move(name), value, std::move(printed)};
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// -log p(t) / t for the one-eigenvalue tail c_0^2/Z exp(-nu_0 t).
double dominant_decay(const DominantTail& tail, double t) { return tail.rate - tail.log_prefactor / t; }

}  // namespace

const ReportCell& ReportRow::cell(const std::string& name) const {
  for (const auto& c : cells)
    if (c.name == name) return c;
  throw DomainError("report row has no cell named " + name);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_scientific(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2E", value);
  return buf;
}

std::string format_tail_error(double e) {
  if (e < 1e-12) return "<E-12";
  if (e < 5e-4) return format_scientific(e);
  return format_fixed(100.0 * e, 2) + "%";
}

double relative_error(double approx, double exact) { return std::fabs(approx - exact) / std::fabs(exact); }

ReportTable table1() {
  ReportTable table{"The eigenvalue nu_0 with rho=0.25", {}};
  const double rho = 0.25;
  for (int k : kTableCapacities) {
    const Spectrum spec = eigen_decompose(QueueParams(rho, k));
    const double exact = spec.eigenvalue(0);
    ReportRow row{rho, k, 0, std::nullopt, {}};
    row.cells.push_back(make_cell("exact", exact, format_fixed(exact, 4)));
    for (int terms = 2; terms <= 4; ++terms) {
      const double approx = eigenvalue_subcritical(rho, k, 0, terms);
      const std::string tag = std::to_string(terms) + "_term";
      const double err = relative_error(approx, exact);
      row.cells.push_back(make_cell(tag, approx, format_fixed(approx, 4)));
      row.cells.push_back(make_cell(tag + "_error", err, format_scientific(err)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReportTable table2() {
  ReportTable table{"The eigenvalues nu_0 and nu_1 with rho=4", {}};
  const double rho = 4.0;
  for (int k : kTableCapacities) {
    const Spectrum spec = eigen_decompose(QueueParams(rho, k));
    ReportRow row{rho, k, std::nullopt, std::nullopt, {}};
    const double nu0 = spec.eigenvalue(0);
    const double nu0_approx = eigenvalue_supercritical_zero(rho, k, 3);
    const double nu1 = spec.eigenvalue(1);
    const double nu1_approx = eigenvalue_supercritical(rho, k, 1, 4);
    const double e0 = relative_error(nu0_approx, nu0);
    const double e1 = relative_error(nu1_approx, nu1);
    row.cells.push_back(make_cell("nu0_exact", nu0, format_fixed(nu0, 6)));
    row.cells.push_back(make_cell("nu0_3_term", nu0_approx, format_fixed(nu0_approx, 6)));
    row.cells.push_back(make_cell("nu0_error", e0, format_scientific(e0)));
    row.cells.push_back(make_cell("nu1_exact", nu1, format_fixed(nu1, 6)));
    row.cells.push_back(make_cell("nu1_4_term", nu1_approx, format_fixed(nu1_approx, 6)));
    row.cells.push_back(make_cell("nu1_error", e1, format_scientific(e1)));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReportTable table3() {
  ReportTable table{"The tail approximation of p(t) with rho=0.25", {}};
  const double rho = 0.25;
  const std::vector<double> times = {10, 20, 25, 40, 55, 100, 1000};
  for (int k : {10, 20}) {
    const Spectrum spec = eigen_decompose(QueueParams(rho, k));
    const ExpansionCoefficients coeffs = expansion_coefficients(spec);
    const DominantTail tail = dominant_tail(spec, coeffs);
    for (double t : times) {
      const double exact = -log_unconditional_density(spec, coeffs, t) / t;
      const double approx = dominant_decay(tail, t);
      const double err = relative_error(approx, exact);
      ReportRow row{rho, k, std::nullopt, t, {}};
      row.cells.push_back(make_cell("exact", exact, format_fixed(exact, 4)));
      row.cells.push_back(make_cell("approx", approx, format_fixed(approx, 4)));
      row.cells.push_back(make_cell("error", err, format_tail_error(err)));
      table.rows.push_back(std::move(row));
    }
    ReportRow limit{rho, k, std::nullopt, std::numeric_limits<double>::infinity(), {}};
    limit.cells.push_back(make_cell("exact", tail.rate, format_fixed(tail.rate, 4)));
    limit.cells.push_back(make_cell("approx", tail.rate, format_fixed(tail.rate, 4)));
    limit.cells.push_back(make_cell("error", 0.0, "--"));
    table.rows.push_back(std::move(limit));
  }
  return table;
}

void write_table_csv(std::ostream& out, const ReportTable& table) {
  out << "rho,K,j,t";
  if (!table.rows.empty())
    for (const auto& c : table.rows.front().cells) out << ',' << c.name << ',' << c.name << "_printed";
  out << '\n';
  for (const auto& row : table.rows) {
    out << csv_number(row.rho) << ',' << row.capacity << ',' << (row.j ? std::to_string(*row.j) : "") << ','
        << (row.t ? csv_number(*row.t) : "");
    for (const auto& c : row.cells) out << ',' << csv_number(c.value) << ',' << c.printed;
    out << '\n';
  }
}

std::string spectrum_json(const Spectrum& spectrum, int count) {
  const int k = spectrum.size();
  const int n = count < 0 ? k : std::min(count, k);
  nlohmann::ordered_json j;
  j["rho"] = spectrum.params().rho();
  j["K"] = spectrum.params().capacity();
  j["eigenvalues"] = std::vector<double>(spectrum.eigenvalues().begin(), spectrum.eigenvalues().begin() + n);
  nlohmann::ordered_json vecs = nlohmann::ordered_json::array();
  for (int i = 0; i < n; ++i) {
    auto v = spectrum.symmetric_vector(i);
    vecs.push_back(std::vector<double>(v.begin(), v.end()));
  }
  j["eigenvectors"] = std::move(vecs);
  j["normalization"] = "symmetric_orthonormal: phi_j(n) = u_j(n) / sqrt(rho^n (n+1)), u_j(K-1) > 0";
  return j.dump(2);
}

void write_root_branches_csv(std::ostream& out) {
  out << "eta,j,r_star\n";
  for (int i = 0; i <= 240; ++i) {
    const double eta = -6.0 + 0.05 * i;
    const auto roots = star_roots(eta, 4);
    for (const auto& r : roots) out << csv_number(eta) << ',' << r.index << ',' << csv_number(r.value) << '\n';
  }
}

std::vector<FigureCase> figure_cases() { return {{4.0, 1}, {4.0, 2}, {0.25, 1}, {0.25, 2}, {1.0, 1}, {1.0, 2}}; }

void write_eigenvector_figures_csv(std::ostream& out, int capacity) {
  out << "rho,j,n,symmetrized\n";
  for (const auto& fc : figure_cases()) {
    const Spectrum spec = eigen_decompose(QueueParams(fc.rho, capacity));
    for (int n = 0; n < capacity; ++n)
      out << csv_number(fc.rho) << ',' << fc.j << ',' << n << ',' << csv_number(spec.symmetrized(fc.j, n)) << '\n';
  }
}

std::vector<SignChangeReport> sign_change_report(int capacity) {
  std::vector<SignChangeReport> out;
  for (const auto& fc : figure_cases()) {
    const Spectrum spec = eigen_decompose(QueueParams(fc.rho, capacity));
    SignChangeReport r;
    r.rho = fc.rho;
    r.j = fc.j;
    r.capacity = capacity;
    r.exact = sign_change_intervals(spec, fc.j);
    r.one_term = predicted_sign_changes(fc.j, fc.rho, capacity, false);
    r.two_term = predicted_sign_changes(fc.j, fc.rho, capacity, true);
    out.push_back(std::move(r));
  }
  return out;
}

void write_sign_change_csv(std::ostream& out, const std::vector<SignChangeReport>& report) {
  out << "rho,j,K,kind,n\n";
  for (const auto& r : report) {
    const std::string prefix = csv_number(r.rho) + ',' + std::to_string(r.j) + ',' + std::to_string(r.capacity) + ',';
    for (int n : r.exact) out << prefix << "exact," << n << '\n';
    for (double n : r.one_term) out << prefix << "one_term," << csv_number(n) << '\n';
    for (double n : r.two_term) out << prefix << "two_term," << csv_number(n) << '\n';
  }
}

TailRegime default_tail_regime(const Regime& regime) {
  switch (regime.kind) {
    case Regime::Kind::Subcritical:
      return TailRegime::RhoBelowOne;
    case Regime::Kind::Supercritical:
      return TailRegime::RhoAboveOne;
    case Regime::Kind::Critical:
      return TailRegime::Uniform;
  }
  return TailRegime::Uniform;
}

std::vector<TailRow> tail_comparison(double rho, int capacity, const std::vector<double>& times, TailRegime regime) {
  const Spectrum spec = eigen_decompose(QueueParams(rho, capacity));
  const ExpansionCoefficients coeffs = expansion_coefficients(spec);
  const DominantTail tail = dominant_tail(spec, coeffs);
  const TailApprox approx = tail_approx(rho, capacity, regime);

  auto error = [](double log_approx, double log_exact, double t) {
    if (t == 0.0) return relative_error(std::exp(log_approx), std::exp(log_exact));
    return relative_error(-log_approx / t, -log_exact / t);
  };

  std::vector<TailRow> rows;
  for (double t : times) {
    const double log_exact = log_unconditional_density(spec, coeffs, t);
    const double log_dominant = tail.log_prefactor - tail.rate * t;
    const double log_asym = approx.log_density(t);
    rows.push_back({t, std::exp(log_exact), std::exp(log_dominant), error(log_dominant, log_exact, t), std::exp(log_asym),
                    error(log_asym, log_exact, t)});
  }
  return rows;
}

void write_tail_csv(std::ostream& out, const std::vector<TailRow>& rows, TailRegime regime) {
  out << "t,p_exact,p_dominant,rel_err_dominant,p_tail,rel_err_tail,tail_regime\n";
  for (const auto& r : rows)
    out << csv_number(r.t) << ',' << csv_number(r.exact) << ',' << csv_number(r.dominant) << ',' << csv_number(r.dominant_error)
        << ',' << csv_number(r.asymptotic) << ',' << csv_number(r.asymptotic_error) << ',' << tail_regime_name(regime) << '\n';
}

}  // namespace psq
