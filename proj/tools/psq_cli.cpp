// Command-line front end: exact spectra, the reference tables, figure data,
// tail comparisons and simulation runs, written as CSV or JSON.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psq/asymptotics.hpp"
#include "psq/errors.hpp"
#include "psq/report.hpp"
#include "psq/simulator.hpp"
#include "psq/spectral.hpp"

using namespace psq;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;

struct Options {
  double rho = 0.25;
  int capacity = 10;
  std::optional<int> j;
  int terms = 4;
  std::optional<double> eta;
  std::vector<double> times;
  std::string t_grid;
  std::string regime = "auto";
  int reps = 10;
  long per_rep = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<double> window;
  std::string out;
  std::string format = "csv";
  int table = 1;
  int figure_capacity = 100;
};

// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DomainError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "0:10:100" is a start:step:stop range, anything else a comma list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DomainError("bad number '" + s + "' in --t-grid");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(to_double(item));
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) throw DomainError("--t-grid range must be start:step:stop");
    const long count = std::lround(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(parts[0] + parts[1] * i);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(item));
  return out;
}

// rho from --eta (rho = 1 + eta K^{-2/3}) when given, otherwise --rho.
double effective_rho(const Options& o) {
  if (o.eta) return 1.0 + *o.eta * std::pow(static_cast<double>(o.capacity), -2.0 / 3.0);
  return o.rho;
}

Regime chosen_regime(const Options& o, double rho) {
  const Regime detected = classify_regime(rho, o.capacity);
  if (o.regime == "auto") return detected;
  Regime chosen;
  if (o.regime == "sub") {
    chosen = Regime::subcritical();
  } else if (o.regime == "super") {
    chosen = Regime::supercritical();
  } else {
    chosen = Regime::critical(QueueParams(rho, o.capacity).eta());
  }
  if (chosen.kind != detected.kind)
    std::cerr << "warning: --regime " << o.regime << " overrides the classifier, which selects " << detected.name() << " for rho="
              << rho << ", K=" << o.capacity << '\n';
  return chosen;
}

void run_spectrum(const Options& o) {
  const Spectrum spec = eigen_decompose(QueueParams(effective_rho(o), o.capacity));
  Sink sink(o.out);
  if (o.format == "json") {
    if (o.j) {
      const int j = *o.j;
      if (j < 0 || j >= spec.size()) throw DomainError("--j must lie in 0..K-1");
      nlohmann::ordered_json doc;
      doc["rho"] = spec.params().rho();
      doc["K"] = spec.params().capacity();
      doc["j"] = j;
      doc["eigenvalue"] = spec.eigenvalue(j);
      auto v = spec.symmetric_vector(j);
      doc["eigenvector"] = std::vector<double>(v.begin(), v.end());
      sink.stream() << doc.dump(2) << '\n';
    } else {
      sink.stream() << spectrum_json(spec) << '\n';
    }
    return;
  }
  std::ostream& out = sink.stream();
  out << "j,nu\n";
  for (int j = 0; j < spec.size(); ++j)
    if (!o.j || *o.j == j) out << j << ',' << number(spec.eigenvalue(j)) << '\n';
}

void run_eigenvalue(const Options& o) {
  const double rho = effective_rho(o);
  const int j = o.j.value_or(0);
  const Spectrum spec = eigen_decompose(QueueParams(rho, o.capacity));
  if (j < 0 || j >= spec.size()) throw DomainError("--j must lie in 0..K-1");
  const Regime regime = chosen_regime(o, rho);
  EigenvalueExpansion series;
  switch (regime.kind) {
    case Regime::Kind::Subcritical:
      series = subcritical_expansion(rho, j);
      break;
    case Regime::Kind::Supercritical:
      series = j == 0 ? supercritical_zero_expansion(rho) : supercritical_expansion(rho, j);
      break;
    case Regime::Kind::Critical:
      series = critical_expansion(regime.eta, j);
      break;
  }
  const int terms = std::min(o.terms, series.max_terms());
  const double exact = spec.eigenvalue(j);
  const double approx = series.value(o.capacity, terms);
  Sink sink(o.out);
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["rho"] = rho;
    doc["K"] = o.capacity;
    doc["j"] = j;
    doc["regime"] = regime.name();
    doc["terms"] = terms;
    doc["exact"] = exact;
    doc["approx"] = approx;
    doc["relative_error"] = relative_error(approx, exact);
    sink.stream() << doc.dump(2) << '\n';
    return;
  }
  sink.stream() << "rho,K,j,regime,terms,exact,approx,relative_error\n"
                << number(rho) << ',' << o.capacity << ',' << j << ',' << regime.name() << ',' << terms << ',' << number(exact)
                << ',' << number(approx) << ',' << number(relative_error(approx, exact)) << '\n';
}

void run_table(const Options& o) {
  ReportTable table;
  switch (o.table) {
    case 1:
      table = table1();
      break;
    case 2:
      table = table2();
      break;
    default:
      table = table3();
      break;
  }
  Sink sink(o.out);
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["title"] = table.title;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json r;
      r["rho"] = row.rho;
      r["K"] = row.capacity;
      if (row.j) r["j"] = *row.j;
      if (row.t) r["t"] = std::isinf(*row.t) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(*row.t);
      for (const auto& c : row.cells) r[c.name] = {{"value", c.value}, {"printed", c.printed}};
      doc["rows"].push_back(std::move(r));
    }
    sink.stream() << doc.dump(2) << '\n';
    return;
  }
  write_table_csv(sink.stream(), table);
}

void run_figures(const Options& o) {
  auto emit = [&](const std::string& name, auto&& writer) {
    if (o.out.empty()) {
      std::cout << "# " << name << '\n';
      writer(std::cout);
      std::cout << '\n';
      return;
    }
    const std::string path = o.out + "/" + name;
    std::ofstream file(path);
    if (!file) throw DomainError("cannot open " + path + " for writing");
    writer(file);
  };
  emit("root_branches.csv", [](std::ostream& s) { write_root_branches_csv(s); });
  emit("eigenvectors.csv", [&](std::ostream& s) { write_eigenvector_figures_csv(s, o.figure_capacity); });
  emit("sign_changes.csv", [&](std::ostream& s) { write_sign_change_csv(s, sign_change_report(o.figure_capacity)); });
}

void run_tail(const Options& o) {
  const double rho = effective_rho(o);
  std::vector<double> times = o.times;
  if (!o.t_grid.empty()) {
    const auto grid = parse_grid(o.t_grid);
    times.insert(times.end(), grid.begin(), grid.end());
  }
  if (times.empty()) throw DomainError("tail needs --t or --t-grid");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("tail times must be finite and non-negative");
  const TailRegime tail_regime = default_tail_regime(chosen_regime(o, rho));
  const auto rows = tail_comparison(rho, o.capacity, times, tail_regime);
  Sink sink(o.out);
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["rho"] = rho;
    doc["K"] = o.capacity;
    doc["tail_regime"] = tail_regime_name(tail_regime);
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      doc["rows"].push_back({{"t", r.t},
                             {"p_exact", r.exact},
                             {"p_dominant", r.dominant},
                             {"rel_err_dominant", r.dominant_error},
                             {"p_tail", r.asymptotic},
                             {"rel_err_tail", r.asymptotic_error}});
    sink.stream() << doc.dump(2) << '\n';
    return;
  }
  write_tail_csv(sink.stream(), rows, tail_regime);
}

double quantile(std::vector<double> v, double q) {
  const std::size_t i = std::min(v.size() - 1, static_cast<std::size_t>(q * static_cast<double>(v.size())));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), v.end());
  return v[i];
}

void run_simulate(const Options& o) {
  SimConfig config{QueueParams(effective_rho(o), o.capacity)};
  config.replications = o.reps;
  config.seed = o.seed;
  config.tagged_per_replication = o.per_rep;
  const auto samples = simulate_sojourns(config, o.threads);

  std::vector<double> sojourns;
  sojourns.reserve(samples.size());
  double mean = 0.0;
  for (const auto& s : samples) {
    sojourns.push_back(s.sojourn);
    mean += s.sojourn;
  }
  if (sojourns.empty()) throw InsufficientDataError("the simulation produced no tagged sojourns");
  mean /= static_cast<double>(sojourns.size());

  // Default window: from the 90% to the 99.9% point of the sample.
  double lo = 0.0, hi = 0.0;
  if (o.window.size() == 2) {
    lo = o.window[0];
    hi = o.window[1];
  } else {
    lo = quantile(sojourns, 0.9);
    hi = quantile(sojourns, 0.999);
  }
  std::optional<TailRateEstimate> est;
  std::string tail_note;
  try {
    est = empirical_tail_rate(samples, lo, hi, o.seed);
  } catch (const InsufficientDataError& e) {
    tail_note = e.what();
  }
  const double nu0 = eigen_decompose(config.params).eigenvalue(0);

  nlohmann::ordered_json summary;
  summary["rho"] = config.params.rho();
  summary["K"] = config.params.capacity();
  summary["replications"] = config.replications;
  summary["seed"] = config.seed;
  summary["samples"] = samples.size();
  summary["mean_sojourn"] = mean;
  summary["window"] = {lo, hi};
  summary["nu0_exact"] = nu0;
  if (est) {
    summary["samples_in_window"] = est->samples_in_window;
    summary["tail_rate"] = est->rate;
    summary["tail_rate_std_error"] = est->std_error;
    summary["tail_rate_relative_gap"] = relative_error(est->rate, nu0);
  } else {
    summary["tail_rate"] = nullptr;
    summary["tail_rate_note"] = tail_note;
  }

  if (o.format == "json") {
    Sink sink(o.out);
    sink.stream() << summary.dump(2) << '\n';
    return;
  }
  // CSV samples go to --out (or stdout); the summary goes to stderr so the
  // CSV stream stays clean.
  Sink sink(o.out);
  write_samples_csv(sink.stream(), samples);
  std::cerr << summary.dump(2) << '\n';
}

void add_model_flags(CLI::App* cmd, Options& o) {
  auto* rho = cmd->add_option("--rho", o.rho, "traffic intensity rho > 0")->capture_default_str();
  cmd->add_option("--K", o.capacity, "capacity K >= 1")->capture_default_str();
  cmd->add_option("--eta", o.eta, "critical scaling: sets rho = 1 + eta K^(-2/3)")->excludes(rho);
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_regime_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--regime", o.regime, "auto, sub, super or critical")
      ->check(CLI::IsMember({"auto", "sub", "super", "critical"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact spectrum, asymptotics and simulation of the M/M/1/K processor-sharing queue"};
  app.require_subcommand(1);
  Options o;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and symmetrized orthonormal eigenvectors");
  add_model_flags(spectrum, o);
  spectrum->add_option("--j", o.j, "restrict to one eigenpair");
  add_output_flags(spectrum, o);

  auto* eigenvalue = app.add_subcommand("eigenvalue", "exact nu_j against its large-K expansion");
  add_model_flags(eigenvalue, o);
  eigenvalue->add_option("--j", o.j, "eigenvalue index (default 0)");
  eigenvalue->add_option("--terms", o.terms, "number of series terms (capped at the series length)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_regime_flag(eigenvalue, o);
  add_output_flags(eigenvalue, o);

  auto* table = app.add_subcommand("table", "regenerate Table 1, 2 or 3");
  table->add_option("which", o.table, "table number")->required()->check(CLI::IsMember({1, 2, 3}));
  add_output_flags(table, o);

  auto* figures = app.add_subcommand("figures", "root branches, eigenvector plots and sign-change report");
  figures->add_option("--K", o.figure_capacity, "capacity of the eigenvector plots")->capture_default_str();
  figures->add_option("--out", o.out, "directory for the three CSV files (default: stdout sections)");

  auto* tail = app.add_subcommand("tail", "exact p(t) against the one-eigenvalue tail and the asymptotic display");
  add_model_flags(tail, o);
  tail->add_option("--t", o.times, "time point(s)");
  tail->add_option("--t-grid", o.t_grid, "comma list or start:step:stop");
  add_regime_flag(tail, o);
  add_output_flags(tail, o);

  auto* simulate = app.add_subcommand("simulate", "simulate tagged sojourn times");
  add_model_flags(simulate, o);
  simulate->add_option("--reps", o.reps, "independent replications")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--per-rep", o.per_rep, "tagged sojourns per replication")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", o.seed, "master seed")->capture_default_str();
  simulate->add_option("--threads", o.threads, "worker threads (0 = hardware)")->capture_default_str();
  simulate->add_option("--window", o.window, "tail-rate window lo hi")->expected(2);
  add_output_flags(simulate, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) run_spectrum(o);
    if (eigenvalue->parsed()) run_eigenvalue(o);
    if (table->parsed()) run_table(o);
    if (figures->parsed()) run_figures(o);
    if (tail->parsed()) run_tail(o);
    if (simulate->parsed()) run_simulate(o);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
