#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "printed_tables.hpp"
#include "psq/errors.hpp"
#include "psq/report.hpp"

using namespace psq;

namespace {

int count_mismatches(const ReportTable& table, const std::vector<fixture::PrintedRow>& printed) {
  REQUIRE(table.rows.size() == printed.size());
  int bad = 0;
  for (std::size_t i = 0; i < printed.size(); ++i) {
    const auto& row = table.rows[i];
    CHECK(row.capacity == printed[i].capacity);
    REQUIRE(row.cells.size() == printed[i].cells.size());
    for (std::size_t c = 0; c < row.cells.size(); ++c)
      if (!fixture::printed_match(row.cells[c].printed, printed[i].cells[c])) ++bad;
  }
  return bad;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("number formats") {
    CHECK(format_fixed(0.36384, 4) == "0.3638");
    CHECK(format_scientific(0.17502) == "1.75E-01");
    CHECK(format_tail_error(0.0988) == "9.88%");
    CHECK(format_tail_error(8e-4) == "0.08%");
    CHECK(format_tail_error(9.73e-5) == "9.73E-05");
    CHECK(format_tail_error(1e-14) == "<E-12");
    CHECK(relative_error(1.1, 1.0) == doctest::Approx(0.1));
  }

  TEST_CASE("printed-precision comparison") {
    CHECK(fixture::printed_match("0.3639", "0.3638"));
    CHECK_FALSE(fixture::printed_match("0.3640", "0.3638"));
    CHECK(fixture::printed_match("3.02E-04", "3.01E-04"));
    CHECK_FALSE(fixture::printed_match("3.02E-05", "3.02E-04"));
    CHECK(fixture::printed_match("7.77%", "7.76%"));
    CHECK_FALSE(fixture::printed_match("0.0776", "7.76%"));
  }

  TEST_CASE("table 1 matches the published cells") { CHECK(count_mismatches(table1(), fixture::table1()) == 0); }

  TEST_CASE("table 2 matches the published cells") { CHECK(count_mismatches(table2(), fixture::table2()) == 0); }

  TEST_CASE("table 1 cells are consistent") {
    for (const auto& row : table1().rows) {
      const double exact = row.cell("exact").value;
      for (const char* tag : {"2_term", "3_term", "4_term"})
        CHECK(row.cell(std::string(tag) + "_error").value == doctest::Approx(relative_error(row.cell(tag).value, exact)));
    }
    CHECK_THROWS_AS(table1().rows[0].cell("nope"), DomainError);
  }

  TEST_CASE("table 3 limit rows and exact cells") {
    const ReportTable t = table3();
    REQUIRE(t.rows.size() == 16);
    CHECK(t.rows[7].cell("exact").printed == "0.3638");
    CHECK(t.rows[15].cell("exact").printed == "0.3022");
    CHECK(std::isinf(*t.rows[7].t));
    // The exact column against direct ODE integration of the model.
    for (const auto& row : t.rows) {
      if (std::isinf(*row.t) || *row.t > 100.0) continue;
      const int k = row.capacity;
      const auto pn = oracle::integrate_conditional(0.25, k, *row.t);
      double p = 0.0;
      for (int n = 0; n < k; ++n) p += 0.75 * std::pow(0.25, n) / (1.0 - std::pow(0.25, k)) * pn[n];
      CHECK(row.cell("exact").value == doctest::Approx(-std::log(p) / *row.t).epsilon(1e-8));
    }
    // Approximations approach the exact values as t grows.
    for (int base : {0, 8})
      for (int i = base + 1; i < base + 7; ++i) CHECK(t.rows[i].cell("error").value < t.rows[i - 1].cell("error").value);
  }

  TEST_CASE("table CSV layout") {
    std::ostringstream out;
    write_table_csv(out, table2());
    const std::string s = out.str();
    CHECK(s.rfind("rho,K,j,t,nu0_exact,nu0_exact_printed,", 0) == 0);
    CHECK(s.find("0.103413") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
  }

  TEST_CASE("spectrum JSON") {
    const auto j = nlohmann::json::parse(spectrum_json(eigen_decompose(QueueParams(0.25, 10)), 3));
    CHECK(j["rho"].get<double>() == 0.25);
    CHECK(j["K"].get<int>() == 10);
    REQUIRE(j["eigenvalues"].size() == 3);
    CHECK(j["eigenvalues"][0].get<double>() == doctest::Approx(0.3638).epsilon(1e-3));
    REQUIRE(j["eigenvectors"].size() == 3);
    CHECK(j["eigenvectors"][0].size() == 10);
    double norm = 0.0;
    for (const auto& v : j["eigenvectors"][1]) norm += v.get<double>() * v.get<double>();
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    const auto full = nlohmann::json::parse(spectrum_json(eigen_decompose(QueueParams(1.0, 1))));
    CHECK(full["eigenvalues"][0].get<double>() == doctest::Approx(1.0));
  }

  TEST_CASE("figure data") {
    std::ostringstream roots;
    write_root_branches_csv(roots);
    const std::string r = roots.str();
    CHECK(std::count(r.begin(), r.end(), '\n') == 1 + 241 * 4);
    std::ostringstream vecs;
    write_eigenvector_figures_csv(vecs);
    const std::string v = vecs.str();
    CHECK(std::count(v.begin(), v.end(), '\n') == 1 + 6 * 100);
  }

  TEST_CASE("sign-change report") {
    const auto report = sign_change_report();
    REQUIRE(report.size() == 6);
    const std::vector<std::vector<int>> expected = {{98}, {70, 98}, {72}, {56, 79}, {84}, {62, 88}};
    for (std::size_t i = 0; i < report.size(); ++i) {
      CHECK(report[i].exact == expected[i]);
      CHECK(report[i].two_term.size() == expected[i].size());
    }
    std::ostringstream out;
    write_sign_change_csv(out, report);
    CHECK(out.str().find("1,1,100,exact,84") != std::string::npos);
  }

  TEST_CASE("tail comparison") {
    const auto rows = tail_comparison(4.0, 10, {10.0}, TailRegime::RhoAboveOne);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].asymptotic == doctest::Approx(std::exp(-1.0) / 10.0));
    CHECK(default_tail_regime(Regime::critical(0.5)) == TailRegime::Uniform);
    CHECK(default_tail_regime(Regime::subcritical()) == TailRegime::RhoBelowOne);
    const auto at0 = tail_comparison(0.25, 10, {0.0, 5.0}, TailRegime::RhoBelowOne);
    double p0 = 0.0;
    for (int n = 0; n < 10; ++n) p0 += 0.75 * std::pow(0.25, n) / (1.0 - std::pow(0.25, 10)) / (n + 1.0);
    CHECK(at0[0].exact == doctest::Approx(p0).epsilon(1e-9));
    std::ostringstream out;
    write_tail_csv(out, at0, TailRegime::RhoBelowOne);
    CHECK(out.str().rfind("t,p_exact,p_dominant,rel_err_dominant,p_tail,rel_err_tail,tail_regime\n", 0) == 0);
  }
}
