#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hetnet/experiments.hpp"

using namespace hetnet;

namespace {

ConfigDoc small_doc() {
  // Reference layout with fewer users so that a snapshot is cheap.
  ConfigDoc doc = reference_config(0.2, SpectrumCase::B1_B2_B3);
  doc.mu_density_per_km2 = 3.0;
  return doc;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("linspace hits both ends") {
  const auto v = linspace(3.0, 5.0, 9);
  REQUIRE(v.size() == 9);
  CHECK(v.front() == 3.0);
  CHECK(v.back() == 5.0);
  CHECK(v[4] == doctest::Approx(4.0));
  CHECK(linspace(1.5, 9.0, 1) == std::vector<double>{1.5});
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("figure presets") {
  const auto f2 = figure_spec("fig2");
  CHECK(f2.target == "tier[2].density_per_km2");
  CHECK(f2.values.size() == 6);
  CHECK(f2.values.front() == 0.4);
  CHECK(f2.values.back() == 0.9);
  REQUIRE(f2.series.size() == 3);
  for (const auto& s : f2.series) CHECK(s.spectrum == SpectrumCase::B1_B2_B3);

  const std::pair<const char*, SpectrumCase> alpha_figs[] = {{"fig3", SpectrumCase::B1_B3_B2},
                                                             {"fig4", SpectrumCase::B2_B3_B1},
                                                             {"fig5", SpectrumCase::B3_B2_B1}};
  for (const auto& [id, other] : alpha_figs) {
    const auto f = figure_spec(id);
    CHECK(f.target == "network.alpha");
    CHECK(f.values.size() == 9);
    REQUIRE(f.series.size() == 2);
    CHECK(f.series[0].spectrum == SpectrumCase::B1_B2_B3);
    CHECK(f.series[1].spectrum == other);
  }
  CHECK_THROWS_AS(figure_spec("fig6"), std::invalid_argument);
}

TEST_CASE("check_sweep rejects unknown targets and non-finite values") {
  const ConfigDoc doc = small_doc();
  SweepSpec s;
  s.target = "network.alpah";
  s.values = {4.0};
  CHECK_THROWS_AS(check_sweep(doc, s), ConfigError);
  s.target = "tier[7].density_per_km2";
  CHECK_THROWS_AS(check_sweep(doc, s), ConfigError);
  s.target = "network.alpha";
  s.values = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(check_sweep(doc, s), ConfigError);
  s.values = {};
  CHECK_THROWS_AS(check_sweep(doc, s), std::invalid_argument);
  s.values = {3.0, 4.0};
  CHECK_NOTHROW(check_sweep(doc, s));
}

TEST_CASE("analytic point at the reference config") {
  const auto row = run_analytic_point(reference_config(0.2, SpectrumCase::B1_B2_B3), {});
  CHECK(row.status == RowStatus::Ok);
  REQUIRE(row.t.size() == 3);
  CHECK(row.t[0] + row.t[1] + row.t[2] == doctest::Approx(1.0));
  CHECK(row.rate > 0.0);
  CHECK(row.iterations.has_value());
  CHECK(row.spectrum == SpectrumCase::B1_B2_B3);
}

TEST_CASE("sweep rows follow series, value, engine, scheme order") {
  SweepSpec s;
  s.target = "network.alpha";
  s.values = {3.5, 4.0};
  s.engines = {Engine::Analytic, Engine::Sim};
  s.schemes = {{Scheme::Proposed}, {Scheme::Cre}};
  s.series = {Series{"a", {}, SpectrumCase::B1_B2_B3}, Series{"b", {}, SpectrumCase::B3_B2_B1}};
  RunOptions opt;
  opt.replications = 2;
  const auto r = run_sweep(small_doc(), s, opt);
  REQUIRE(r.rows.size() == 2 * 2 * 2 * 2);
  std::size_t i = 0;
  for (const char* series : {"a", "b"}) {
    for (double v : s.values) {
      for (Engine e : s.engines) {
        for (Scheme sc : {Scheme::Proposed, Scheme::Cre}) {
          const auto& row = r.rows[i++];
          CHECK(row.series == series);
          CHECK(row.value == v);
          CHECK(row.engine == e);
          CHECK(row.scheme.variant == sc);
          const bool analytic_baseline = e == Engine::Analytic && sc != Scheme::Proposed;
          CHECK((row.status == RowStatus::Error) == analytic_baseline);
        }
      }
    }
  }
  CHECK(r.has_errors());
}

TEST_CASE("sweep output does not depend on the worker count") {
  SweepSpec s;
  s.target = "tier[2].density_per_km2";
  s.values = {0.4, 0.6, 0.8};
  s.engines = {Engine::Analytic, Engine::Sim};
  RunOptions opt;
  opt.replications = 2;
  opt.seed = 7;
  CsvMeta meta;
  meta.command = "sweep";
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(a, run_sweep(small_doc(), s, opt), meta);
  opt.jobs = 3;
  write_sweep_csv(b, run_sweep(small_doc(), s, opt), meta);
  CHECK(a.str() == b.str());
}

TEST_CASE("invalid swept values give error rows, not exceptions") {
  SweepSpec s;
  s.target = "network.alpha";
  s.values = {2.0, 4.0};
  s.engines = {Engine::Analytic, Engine::Sim};
  RunOptions opt;
  opt.replications = 1;
  const auto r = run_sweep(small_doc(), s, opt);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].status == RowStatus::Error);
  CHECK(r.rows[1].status == RowStatus::Error);
  CHECK_FALSE(r.rows[0].error.empty());
  CHECK(r.rows[2].status == RowStatus::Ok);
  CHECK(r.rows[3].status == RowStatus::Ok);

  std::ostringstream csv;
  write_sweep_csv(csv, r, {});
  const auto lines = data_lines(csv.str());
  REQUIRE(lines.size() == 5);
  CHECK(csv.str().find("nan") == std::string::npos);
  CHECK(lines[1].find(",error,") != std::string::npos);
}

TEST_CASE("csv layout") {
  SweepResult r;
  r.tier_count = 3;
  r.rows.push_back(run_analytic_point(small_doc(), {}));
  CsvMeta meta;
  meta.command = "analytic";
  meta.seed = 9;
  meta.config_hash = config_hash(small_doc());
  std::ostringstream out;
  write_sweep_csv(out, r, meta);
  const std::string s = out.str();
  CHECK(s.rfind("# tool: hetnet ", 0) == 0);
  CHECK(s.find("# seed: 9") != std::string::npos);
  const auto lines = data_lines(s);
  REQUIRE(lines.size() == 2);
  const std::string header = lines[0];
  CHECK(header.rfind("series,target,value,engine,scheme,rate_metric,spectrum_case,status,T_1,T_2,T_3,", 0) == 0);
  auto columns = [](const std::string& line) {
    std::size_t n = 1;
    for (char c : line) n += c == ',';
    return n;
  };
  CHECK(columns(lines[1]) == columns(header));
}

TEST_CASE("config hash tracks the effective config") {
  ConfigDoc a = small_doc();
  ConfigDoc b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.alpha = 3.9;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("approximation checks at the reference config") {
  RunOptions opt;
  opt.replications = 2;
  const auto checks = validate_approximations(reference_config(0.2, SpectrumCase::B1_B2_B3), opt);
  CHECK(checks.size() >= 3 * 4);
  for (const auto& c : checks) {
    CAPTURE(c.check);
    CAPTURE(c.tier);
    CHECK(std::isfinite(c.value));
    CHECK(c.tier >= 1);
    CHECK(c.tier <= 3);
  }
}
