#include "hetnet/cli.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetnet/config.hpp"
#include "hetnet/experiments.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

namespace {

using json = nlohmann::json;

struct Args {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t replications = 100;
  std::string rate_metric = "full_band";
  std::vector<std::string> schemes{"proposed"};
  std::optional<double> noise_dbm;
  std::size_t jobs = 1;
  std::string target;
  std::vector<double> values;
  std::vector<double> range;
  std::vector<std::string> engines{"analytic"};
  std::string spectrum_case;
  std::string figure_id;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(std::ostream& err, const json& j) { err << j.dump() << "\n"; }

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "network config file")->required();
  cmd->add_option("--out", a.out, "CSV output path (stdout when omitted)");
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--replications", a.replications, "simulation snapshots")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rate-metric", a.rate_metric, "full_band | equal_share");
  cmd->add_option("--scheme", a.schemes, "proposed | cre | max_rss | max_sinr | nearest")
      ->delimiter(',');
  cmd->add_option("--noise-dbm", a.noise_dbm, "noise power in dBm");
  cmd->add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
}

std::vector<AssociationScheme> parse_schemes(const Args& a, RateMetric metric) {
  std::vector<AssociationScheme> out;
  for (const auto& name : a.schemes) {
    const auto s = parse_scheme(name);
    if (!s) throw UsageError("unknown scheme '" + name + "'");
    out.push_back({*s, metric});
  }
  if (out.empty()) throw UsageError("--scheme needs at least one value");
  return out;
}

std::vector<Engine> parse_engines(const Args& a) {
  std::vector<Engine> out;
  for (const auto& name : a.engines) {
    const auto e = parse_engine(name);
    if (!e) throw UsageError("unknown engine '" + name + "'");
    out.push_back(*e);
  }
  if (out.empty()) throw UsageError("--engine needs at least one value");
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

int finish(const SweepResult& result, std::ostream& err) {
  int code = kExitOk;
  for (const auto& r : result.rows) {
    if (r.status == RowStatus::Ok) continue;
    json j{{"error", r.status == RowStatus::Error ? "numerical" : "convergence"},
           {"message", r.error},
           {"engine", to_string(r.engine)},
           {"scheme", to_string(r.scheme.variant)}};
    if (r.value) j["value"] = *r.value;
    if (!r.series.empty()) j["series"] = r.series;
    emit(err, j);
    code = kExitNumerical;
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"Load-aware cell association for K-tier HetNets: analysis and simulation", "hetnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  auto* analytic = app.add_subcommand("analytic", "fixed point and average rate at one config");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo metrics at one config");
  auto* sweep = app.add_subcommand("sweep", "vary one config entry");
  auto* figure = app.add_subcommand("figure", "preset sweeps fig2..fig5");
  auto* validate_cmd = app.add_subcommand("validate-approx", "cell-area and thinned-load checks");
  for (auto* cmd : {analytic, simulate, sweep, figure, validate_cmd}) add_common(cmd, a);
  for (auto* cmd : {analytic, simulate, sweep}) {
    cmd->add_option("--spectrum-case", a.spectrum_case, "bandwidth preset, e.g. B1>B2>B3");
  }
  sweep->add_option("--target", a.target, "dotted config path, e.g. tier[2].density_per_km2")
      ->required();
  auto* values = sweep->add_option("--values", a.values, "comma-separated values")->delimiter(',');
  auto* range = sweep->add_option("--range", a.range, "from,to,steps")->delimiter(',')->expected(3);
  values->excludes(range);
  for (auto* cmd : {sweep, figure}) {
    cmd->add_option("--engine", a.engines, "analytic,sim")->delimiter(',');
  }
  figure->add_option("--id", a.figure_id, "fig2 | fig3 | fig4 | fig5")->required();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit(err, json{{"error", "usage"}, {"message", e.what()}});
    return kExitConfig;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string command = cmd->get_name();

  ConfigDoc doc;
  RunOptions opt;
  std::vector<AssociationScheme> schemes;
  std::optional<SweepSpec> spec;
  try {
    doc = load_config(a.config);
    if (a.noise_dbm) doc.noise_dbm = *a.noise_dbm;
    if (!a.spectrum_case.empty()) {
      const auto c = parse_spectrum_case(a.spectrum_case);
      if (!c) throw UsageError("unknown spectrum case '" + a.spectrum_case + "'");
      apply_spectrum(doc, *c);
    }
    const auto metric = parse_rate_metric(a.rate_metric);
    if (!metric) throw UsageError("unknown rate metric '" + a.rate_metric + "'");
    schemes = parse_schemes(a, *metric);
    opt.seed = a.seed;
    opt.replications = a.replications;
    opt.jobs = a.jobs;
    opt.rate_metric = *metric;

    const auto vr = validate(to_model(doc));
    if (!vr.ok()) {
      json list = json::array();
      for (const auto& v : vr.violations) {
        json item{{"kind", to_string(v.kind)}, {"message", v.message}};
        if (v.tier) item["tier"] = *v.tier;
        list.push_back(item);
      }
      emit(err, json{{"error", "config"}, {"message", "invalid network model"}, {"violations", list}});
      return kExitConfig;
    }

    if (command == "sweep") {
      SweepSpec s;
      s.target = a.target;
      if (!a.range.empty()) {
        if (a.range[2] < 1.0 || a.range[2] != std::floor(a.range[2])) {
          throw UsageError("--range steps must be a positive integer");
        }
        s.values = linspace(a.range[0], a.range[1], static_cast<std::size_t>(a.range[2]));
      } else {
        s.values = a.values;
      }
      if (s.values.empty()) throw UsageError("sweep needs --values or --range");
      s.engines = parse_engines(a);
      s.schemes = schemes;
      check_sweep(doc, s);
      spec = std::move(s);
    } else if (command == "figure") {
      SweepSpec s = figure_spec(a.figure_id);
      s.engines = parse_engines(a);
      s.schemes = schemes;
      check_sweep(doc, s);
      spec = std::move(s);
    }
  } catch (const ConfigError& e) {
    emit(err, json{{"error", "config"}, {"key", e.key()}, {"message", e.what()}});
    return kExitConfig;
  } catch (const UsageError& e) {
    emit(err, json{{"error", "usage"}, {"message", e.what()}});
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    emit(err, json{{"error", "usage"}, {"message", e.what()}});
    return kExitConfig;
  }

  CsvMeta meta;
  meta.command = command;
  meta.seed = opt.seed;
  meta.config_hash = config_hash(doc);
  meta.extra.emplace_back("replications", std::to_string(opt.replications));
  meta.extra.emplace_back("rate_metric", std::string(to_string(opt.rate_metric)));
  meta.extra.emplace_back("schemes", join(a.schemes));
  if (spec) {
    meta.extra.emplace_back("target", spec->target);
    meta.extra.emplace_back("engines", join(a.engines));
  }
  if (command == "figure") meta.extra.emplace_back("figure", a.figure_id);

  std::ostringstream csv;
  int code = kExitOk;
  try {
    if (command == "validate-approx") {
      write_checks_csv(csv, validate_approximations(doc, opt), meta);
    } else {
      SweepResult result;
      result.tier_count = doc.tiers.size();
      if (command == "analytic") {
        for (const auto& s : schemes) {
          if (s.variant != Scheme::Proposed) {
            throw UsageError("the analytic command covers only the proposed scheme");
          }
        }
        result.rows.push_back(run_analytic_point(doc, opt));
      } else if (command == "simulate") {
        result.rows = run_sim_point(doc, schemes, opt);
      } else {
        result = run_sweep(doc, *spec, opt);
      }
      write_sweep_csv(csv, result, meta);
      code = finish(result, err);
    }
  } catch (const UsageError& e) {
    emit(err, json{{"error", "usage"}, {"message", e.what()}});
    return kExitConfig;
  } catch (const std::exception& e) {
    emit(err, json{{"error", "numerical"}, {"message", e.what()}});
    return kExitNumerical;
  }

  if (a.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(a.out, std::ios::binary);
    file << csv.str();
    if (!file) {
      emit(err, json{{"error", "io"}, {"message", "cannot write '" + a.out + "'"}});
      return kExitIo;
    }
  }
  return code;
}

}  // namespace hetnet
