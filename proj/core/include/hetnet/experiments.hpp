#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/config.hpp"
#include "hetnet/model.hpp"

namespace hetnet {

std::string_view tool_version();

enum class Engine { Analytic, Sim };

std::string_view to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view name);

// One curve of a sweep: fixed overrides and an optional bandwidth preset
// applied to the base config before the swept target.
struct Series {
  std::string label;
  std::vector<std::pair<std::string, double>> overrides;
  std::optional<SpectrumCase> spectrum;
};

struct SweepSpec {
  std::string target;
  std::vector<double> values;
  std::vector<Engine> engines{Engine::Analytic};
  std::vector<AssociationScheme> schemes{AssociationScheme{}};
  std::vector<Series> series{Series{}};
};

// Throws ConfigError when the target does not resolve or a value is not
// finite, std::invalid_argument for an empty value list.
void check_sweep(const ConfigDoc& base, const SweepSpec& spec);

// from, from + h, ..., to with `steps` points (steps >= 2), or {from} if steps == 1.
std::vector<double> linspace(double from, double to, std::size_t steps);

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t replications = 100;
  std::size_t jobs = 1;
  RateMetric rate_metric = RateMetric::FullBand;
  QuadSettings quad{};
  FixedPointOptions fixed_point{};
};

enum class RowStatus { Ok, NotConverged, Error };
std::string_view to_string(RowStatus s);

struct SweepRow {
  std::string series;
  std::string target;
  std::optional<double> value;
  Engine engine = Engine::Analytic;
  AssociationScheme scheme{};
  std::optional<SpectrumCase> spectrum;
  RowStatus status = RowStatus::Ok;
  std::vector<double> t;
  std::vector<double> t_se;  // sim rows only
  double rate = 0.0;         // nats/s
  std::optional<double> rate_se;
  std::vector<double> tier_rate;
  std::vector<double> tier_rate_se;
  // Analytic diagnostics.
  std::optional<int> iterations;
  std::optional<double> residual;
  std::optional<double> sum_deviation;
  // Sim diagnostics.
  std::optional<double> convergence_fraction;
  std::optional<double> mean_rounds;
  std::optional<std::size_t> replications;
  std::string error;
};

struct SweepResult {
  std::size_t tier_count = 0;
  std::vector<SweepRow> rows;

  [[nodiscard]] bool has_errors() const;
  [[nodiscard]] bool has_unconverged() const;
};

SweepRow run_analytic_point(const ConfigDoc& doc, const RunOptions& opt);
std::vector<SweepRow> run_sim_point(const ConfigDoc& doc, const std::vector<AssociationScheme>& schemes,
                                    const RunOptions& opt);

// Rows come out in (series, value, engine, scheme) order whatever the number
// of workers.
SweepResult run_sweep(const ConfigDoc& base, const SweepSpec& spec, const RunOptions& opt);

// fig2..fig5 presets; throws std::invalid_argument for other ids.
SweepSpec figure_spec(std::string_view id);

struct CsvMeta {
  std::string command;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

std::uint64_t config_hash(const ConfigDoc& doc);

// Shortest round-trip decimal form.
std::string format_double(double v);

// Column layout for a K-tier result:
//   series, target, value, engine, scheme, rate_metric, spectrum_case, status,
//   T_1..T_K, T_se_1..T_se_K, rate_nats, rate_se_nats, rate_bits,
//   rate_tier_1..K, rate_tier_se_1..K, iterations, residual, sum_deviation,
//   convergence_fraction, mean_rounds, replications, error
// Not-applicable cells are empty.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const CsvMeta& meta);

struct ApproxCheck {
  std::string check;
  std::size_t tier = 0;  // 1-based
  std::string statistic;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Cell-area and thinned-load checks for every tier.
std::vector<ApproxCheck> validate_approximations(const ConfigDoc& doc, const RunOptions& opt);

void write_checks_csv(std::ostream& out, const std::vector<ApproxCheck>& checks, const CsvMeta& meta);

}  // namespace hetnet
