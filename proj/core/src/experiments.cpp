#include "hetnet/experiments.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hetnet/sim.hpp"
#include "hetnet/stats.hpp"

#ifndef HETNET_VERSION
#define HETNET_VERSION "0.0.0"
#endif

namespace hetnet {

std::string_view tool_version() { return HETNET_VERSION; }

std::string_view to_string(Engine e) { return e == Engine::Analytic ? "analytic" : "sim"; }

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "analytic") return Engine::Analytic;
  if (name == "sim") return Engine::Sim;
  return std::nullopt;
}

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok:
      return "ok";
    case RowStatus::NotConverged:
      return "not_converged";
    case RowStatus::Error:
      return "error";
  }
  return "error";
}

bool SweepResult::has_errors() const {
  for (const auto& r : rows) {
    if (r.status == RowStatus::Error) return true;
  }
  return false;
}

bool SweepResult::has_unconverged() const {
  for (const auto& r : rows) {
    if (r.status == RowStatus::NotConverged) return true;
  }
  return false;
}

std::vector<double> linspace(double from, double to, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("a range needs at least one step");
  if (steps == 1) return {from};
  std::vector<double> v(steps);
  const double h = (to - from) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) v[i] = from + h * static_cast<double>(i);
  v.back() = to;
  return v;
}

void check_sweep(const ConfigDoc& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw ConfigError(spec.target, "sweep values must be finite");
  }
  if (spec.engines.empty()) throw std::invalid_argument("sweep needs at least one engine");
  if (spec.schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  for (const auto& s : spec.series) {
    ConfigDoc doc = base;
    for (const auto& [target, value] : s.overrides) apply_override(doc, target, value);
    if (s.spectrum) apply_spectrum(doc, *s.spectrum);
    apply_override(doc, spec.target, spec.values.front());
  }
}

namespace {

std::optional<SpectrumCase> detect_spectrum(const ConfigDoc& doc) {
  if (doc.tiers.size() != 3) return std::nullopt;
  for (auto c : {SpectrumCase::B1_B2_B3, SpectrumCase::B1_B3_B2, SpectrumCase::B2_B3_B1,
                 SpectrumCase::B3_B2_B1}) {
    const auto bw = spectrum_mhz(c);
    if (doc.tiers[0].bandwidth_mhz == bw[0] && doc.tiers[1].bandwidth_mhz == bw[1] &&
        doc.tiers[2].bandwidth_mhz == bw[2]) {
      return c;
    }
  }
  return std::nullopt;
}

SweepRow error_row(const ConfigDoc& doc, Engine engine, const AssociationScheme& scheme,
                   std::string message) {
  SweepRow row;
  row.engine = engine;
  row.scheme = scheme;
  row.spectrum = detect_spectrum(doc);
  row.status = RowStatus::Error;
  row.error = std::move(message);
  return row;
}

const ValidatedModel& checked(const ValidationResult& vr) { return vr.value(); }

}  // namespace

SweepRow run_analytic_point(const ConfigDoc& doc, const RunOptions& opt) {
  AssociationScheme scheme{Scheme::Proposed, opt.rate_metric};
  try {
    const auto vr = validate(to_model(doc));
    const RateReport rep =
        average_ergodic_rate(checked(vr), opt.quad, opt.rate_metric, opt.fixed_point);
    SweepRow row;
    row.engine = Engine::Analytic;
    row.scheme = scheme;
    row.spectrum = detect_spectrum(doc);
    row.status = rep.tier_probs.converged ? RowStatus::Ok : RowStatus::NotConverged;
    row.t = rep.tier_probs.t;
    row.rate = rep.average_rate;
    row.tier_rate = rep.per_tier_rate;
    row.iterations = rep.tier_probs.iterations;
    row.residual = rep.tier_probs.residual;
    row.sum_deviation = rep.tier_probs.sum_deviation;
    if (!rep.tier_probs.converged) row.error = "fixed point did not converge";
    return row;
  } catch (const std::exception& e) {
    return error_row(doc, Engine::Analytic, scheme, e.what());
  }
}

std::vector<SweepRow> run_sim_point(const ConfigDoc& doc, const std::vector<AssociationScheme>& schemes,
                                    const RunOptions& opt) {
  std::vector<SweepRow> rows;
  try {
    const auto vr = validate(to_model(doc));
    SimSettings settings;
    settings.replications = opt.replications;
    settings.seed = opt.seed;
    settings.jobs = opt.jobs;
    const auto tables = estimate_metrics(checked(vr), schemes, settings);
    for (const auto& t : tables) {
      SweepRow row;
      row.engine = Engine::Sim;
      row.scheme = t.scheme;
      row.spectrum = detect_spectrum(doc);
      const bool equal = t.scheme.rate_metric == RateMetric::EqualShare;
      const MeanSe& r = t.rate(t.scheme.rate_metric);
      row.rate = r.mean;
      row.rate_se = r.se;
      const auto& per_tier = equal ? t.tier_rate_equal_share : t.tier_rate_full_band;
      for (std::size_t k = 0; k < t.tier_share.size(); ++k) {
        row.t.push_back(t.tier_share[k].mean);
        row.t_se.push_back(t.tier_share[k].se);
        row.tier_rate.push_back(per_tier[k].mean);
        row.tier_rate_se.push_back(per_tier[k].se);
      }
      row.convergence_fraction = t.convergence_fraction;
      row.mean_rounds = t.mean_rounds;
      row.replications = t.replications;
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    rows.clear();
    for (const auto& s : schemes) rows.push_back(error_row(doc, Engine::Sim, s, e.what()));
  }
  return rows;
}

SweepResult run_sweep(const ConfigDoc& base, const SweepSpec& spec, const RunOptions& opt) {
  check_sweep(base, spec);

  struct Cell {
    std::size_t series;
    std::size_t value;
    Engine engine;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      for (Engine e : spec.engines) cells.push_back({s, v, e});
    }
  }

  std::vector<std::vector<SweepRow>> out(cells.size());
  const bool single = cells.size() == 1;
  RunOptions inner = opt;
  if (!single) inner.jobs = 1;

  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    const Series& series = spec.series[c.series];
    ConfigDoc doc = base;
    for (const auto& [target, value] : series.overrides) apply_override(doc, target, value);
    if (series.spectrum) apply_spectrum(doc, *series.spectrum);
    apply_override(doc, spec.target, spec.values[c.value]);

    std::vector<SweepRow> rows;
    if (c.engine == Engine::Analytic) {
      for (const auto& scheme : spec.schemes) {
        if (scheme.variant != Scheme::Proposed) {
          rows.push_back(error_row(doc, Engine::Analytic, scheme,
                                   "the analytic engine covers only the proposed scheme"));
          continue;
        }
        RunOptions point = inner;
        point.rate_metric = scheme.rate_metric;
        rows.push_back(run_analytic_point(doc, point));
      }
    } else {
      rows = run_sim_point(doc, spec.schemes, inner);
    }
    for (auto& r : rows) {
      r.series = series.label;
      r.target = spec.target;
      r.value = spec.values[c.value];
    }
    out[i] = std::move(rows);
  };
  parallel_for(cells.size(), single ? 1 : opt.jobs, run_cell);

  SweepResult result;
  result.tier_count = base.tiers.size();
  for (auto& rows : out) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  return result;
}

SweepSpec figure_spec(std::string_view id) {
  SweepSpec spec;
  auto alpha_figure = [&](SpectrumCase other) {
    spec.target = "network.alpha";
    spec.values = linspace(3.0, 5.0, 9);
    spec.series.clear();
    for (auto c : {SpectrumCase::B1_B2_B3, other}) {
      spec.series.push_back(Series{std::string(to_string(c)), {}, c});
    }
  };
  if (id == "fig2") {
    spec.target = "tier[2].density_per_km2";
    spec.values = linspace(0.4, 0.9, 6);
    spec.series.clear();
    for (double a : {3.5, 4.0, 4.5}) {
      spec.series.push_back(
          Series{"alpha=" + format_double(a), {{"network.alpha", a}}, SpectrumCase::B1_B2_B3});
    }
  } else if (id == "fig3") {
    alpha_figure(SpectrumCase::B1_B3_B2);
  } else if (id == "fig4") {
    alpha_figure(SpectrumCase::B2_B3_B1);
  } else if (id == "fig5") {
    alpha_figure(SpectrumCase::B3_B2_B1);
  } else {
    throw std::invalid_argument("unknown figure id '" + std::string(id) + "'");
  }
  return spec;
}

std::uint64_t config_hash(const ConfigDoc& doc) { return fnv1a64(to_toml(doc)); }

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
  std::string s(buf, ptr);
  return std::string(16 - s.size(), '0') + s;
}

// Quotes fields holding separators, quotes or line breaks.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

template <typename T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

void write_meta(std::ostream& out, const CsvMeta& meta) {
  out << "# tool: hetnet " << tool_version() << "\n";
  out << "# command: " << meta.command << "\n";
  out << "# seed: " << meta.seed << "\n";
  out << "# config_hash: fnv1a64:" << hex64(meta.config_hash) << "\n";
  for (const auto& [k, v] : meta.extra) out << "# " << k << ": " << v << "\n";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result, const CsvMeta& meta) {
  write_meta(out, meta);
  const std::size_t K = result.tier_count;
  std::vector<std::string> header = {"series", "target", "value", "engine", "scheme",
                                     "rate_metric", "spectrum_case", "status"};
  for (std::size_t k = 1; k <= K; ++k) header.push_back("T_" + std::to_string(k));
  for (std::size_t k = 1; k <= K; ++k) header.push_back("T_se_" + std::to_string(k));
  header.insert(header.end(), {"rate_nats", "rate_se_nats", "rate_bits"});
  for (std::size_t k = 1; k <= K; ++k) header.push_back("rate_tier_" + std::to_string(k));
  for (std::size_t k = 1; k <= K; ++k) header.push_back("rate_tier_se_" + std::to_string(k));
  header.insert(header.end(), {"iterations", "residual", "sum_deviation", "convergence_fraction",
                               "mean_rounds", "replications", "error"});
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";

  for (const auto& r : result.rows) {
    std::vector<std::string> f;
    f.push_back(csv_field(r.series));
    f.push_back(csv_field(r.target));
    f.push_back(opt_field(r.value));
    f.emplace_back(to_string(r.engine));
    f.emplace_back(to_string(r.scheme.variant));
    f.emplace_back(to_string(r.scheme.rate_metric));
    f.push_back(r.spectrum ? std::string(to_string(*r.spectrum)) : std::string("custom"));
    f.emplace_back(to_string(r.status));
    const bool has_values = r.status != RowStatus::Error;
    auto per_tier = [&](const std::vector<double>& v) {
      for (std::size_t k = 0; k < K; ++k) {
        f.push_back(has_values && k < v.size() ? format_double(v[k]) : std::string());
      }
    };
    per_tier(r.t);
    per_tier(r.t_se);
    f.push_back(has_values ? format_double(r.rate) : std::string());
    f.push_back(has_values ? opt_field(r.rate_se) : std::string());
    f.push_back(has_values ? format_double(r.rate / std::numbers::ln2) : std::string());
    per_tier(r.tier_rate);
    per_tier(r.tier_rate_se);
    f.push_back(opt_field(r.iterations));
    f.push_back(opt_field(r.residual));
    f.push_back(opt_field(r.sum_deviation));
    f.push_back(opt_field(r.convergence_fraction));
    f.push_back(opt_field(r.mean_rounds));
    f.push_back(opt_field(r.replications));
    f.push_back(csv_field(r.error));
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << "\n";
  }
}

std::vector<ApproxCheck> validate_approximations(const ConfigDoc& doc, const RunOptions& opt) {
  constexpr double kCellsPerWindow = 400.0;
  constexpr double kProbesPerCell = 500.0;
  const auto vr = validate(to_model(doc));
  const ValidatedModel& vm = checked(vr);
  const NetworkModel& model = vm;
  const double c = model.cell_area_shape;
  const TierProbabilities tp = solve_tier_probabilities(vm, opt.quad, opt.fixed_point);

  std::vector<ApproxCheck> checks;
  for (std::size_t k = 0; k < model.tier_count(); ++k) {
    const double density = model.tiers[k].density;
    const Window window = Window::for_count(density, kCellsPerWindow);
    const std::uint64_t seed = derive_seed(opt.seed, k);

    const auto area = estimate_cell_area_distribution(
        model, k, opt.replications, kProbesPerCell * per_m2_to_per_km2(density), seed, window,
        opt.jobs);
    const double ks = ks_distance(area.normalized_area,
                                  [c](double x) { return gamma_cdf(x, c, c); });
    checks.push_back({"cell_area", k + 1, "mean", area.mean, 1.0, 0.01,
                      std::abs(area.mean - 1.0) <= 0.01});
    checks.push_back({"cell_area", k + 1, "variance", area.variance, 1.0 / c, 0.05 / c,
                      std::abs(area.variance - 1.0 / c) <= 0.05 / c});
    checks.push_back({"cell_area", k + 1, "ks_distance", ks, 0.0, 0.02, ks < 0.02});

    const auto load = estimate_thinned_load(model, k, tp.t[k], opt.replications,
                                            derive_seed(seed, 7), window, opt.jobs);
    const LoadDistribution analytic(model, k, tp.t[k], opt.quad.series_tail_tol);
    const std::vector<double> ref(analytic.pmf_table().begin(), analytic.pmf_table().end());
    const double tv = total_variation(load.pmf, ref);
    checks.push_back({"thinned_load", k + 1, "total_variation", tv, 0.0, 0.05, tv < 0.05});
    const double mean_target = tp.t[k] * model.mu_density / density;
    checks.push_back({"thinned_load", k + 1, "mean", load.mean, mean_target, 0.05 * mean_target,
                      std::abs(load.mean - mean_target) <= 0.05 * mean_target});
  }
  return checks;
}

void write_checks_csv(std::ostream& out, const std::vector<ApproxCheck>& checks,
                      const CsvMeta& meta) {
  write_meta(out, meta);
  out << "check,tier,statistic,value,target,tolerance,pass\n";
  for (const auto& c : checks) {
    out << c.check << "," << c.tier << "," << c.statistic << "," << format_double(c.value) << ","
        << format_double(c.target) << "," << format_double(c.tolerance) << ","
        << (c.pass ? "true" : "false") << "\n";
  }
}

}  // namespace hetnet
