#include "hetnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetnet {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Cre: return "cre";
    case Scheme::MaxRss: return "max_rss";
    case Scheme::MaxSinr: return "max_sinr";
    case Scheme::Nearest: return "nearest";
  }
  return "?";
}

std::string_view to_string(RateMetric m) {
  return m == RateMetric::FullBand ? "full_band" : "equal_share";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : {Scheme::Proposed, Scheme::Cre, Scheme::MaxRss, Scheme::MaxSinr,
                 Scheme::Nearest}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<RateMetric> parse_rate_metric(std::string_view name) {
  if (name == "full_band") return RateMetric::FullBand;
  if (name == "equal_share") return RateMetric::EqualShare;
  return std::nullopt;
}

double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

double watts_to_dbm(double p_watts) { return 10.0 * std::log10(p_watts) + 30.0; }

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::NoTiers: return "NoTiers";
    case ViolationKind::InvalidAlpha: return "InvalidAlpha";
    case ViolationKind::NonPositiveDensity: return "NonPositiveDensity";
    case ViolationKind::NonPositivePower: return "NonPositivePower";
    case ViolationKind::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ViolationKind::NonPositiveBias: return "NonPositiveBias";
    case ViolationKind::NegativeNoise: return "NegativeNoise";
    case ViolationKind::NonPositiveMuDensity: return "NonPositiveMuDensity";
    case ViolationKind::NonPositiveCellAreaShape: return "NonPositiveCellAreaShape";
  }
  return "?";
}

const ValidatedModel& ValidationResult::value() const {
  if (model) return *model;
  std::string msg = "invalid network model:";
  for (const auto& v : violations) msg += " [" + v.message + "]";
  throw std::invalid_argument(msg);
}

namespace {

// NaN fails every positivity check.
bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

ValidationResult validate(const NetworkModel& model) {
  ValidationResult result;
  auto& out = result.violations;
  auto add = [&out](ViolationKind kind, std::optional<std::size_t> tier, std::string msg) {
    out.push_back(Violation{kind, tier, std::move(msg)});
  };

  if (model.tiers.empty()) add(ViolationKind::NoTiers, std::nullopt, "at least one tier is required");
  if (!(model.alpha > 2.0) || !std::isfinite(model.alpha)) {
    add(ViolationKind::InvalidAlpha, std::nullopt,
        "path-loss exponent must exceed 2, got " + std::to_string(model.alpha));
  }
  if (!(model.noise_power >= 0.0) || !std::isfinite(model.noise_power)) {
    add(ViolationKind::NegativeNoise, std::nullopt, "noise power must be >= 0");
  }
  if (!positive(model.mu_density)) {
    add(ViolationKind::NonPositiveMuDensity, std::nullopt, "user density must be > 0");
  }
  if (!positive(model.cell_area_shape)) {
    add(ViolationKind::NonPositiveCellAreaShape, std::nullopt, "cell area shape must be > 0");
  }
  for (std::size_t i = 0; i < model.tiers.size(); ++i) {
    const auto& t = model.tiers[i];
    const std::size_t idx = i + 1;
    const std::string where = "tier " + std::to_string(idx) + ": ";
    if (!positive(t.density)) add(ViolationKind::NonPositiveDensity, idx, where + "density must be > 0");
    if (!positive(t.tx_power)) add(ViolationKind::NonPositivePower, idx, where + "power must be > 0");
    if (!positive(t.bandwidth)) add(ViolationKind::NonPositiveBandwidth, idx, where + "bandwidth must be > 0");
    if (!positive(t.cre_bias)) add(ViolationKind::NonPositiveBias, idx, where + "cre_bias must be > 0");
  }

  if (out.empty()) result.model = ValidatedModel(model);
  return result;
}

std::string_view to_string(SpectrumCase c) {
  switch (c) {
    case SpectrumCase::B1_B2_B3: return "B1>B2>B3";
    case SpectrumCase::B1_B3_B2: return "B1>B3>B2";
    case SpectrumCase::B2_B3_B1: return "B2>B3>B1";
    case SpectrumCase::B3_B2_B1: return "B3>B2>B1";
  }
  return "?";
}

std::optional<SpectrumCase> parse_spectrum_case(std::string_view name) {
  for (auto c : {SpectrumCase::B1_B2_B3, SpectrumCase::B1_B3_B2, SpectrumCase::B2_B3_B1,
                 SpectrumCase::B3_B2_B1}) {
    std::string alt(to_string(c));
    std::replace(alt.begin(), alt.end(), '>', '_');
    if (to_string(c) == name || alt == name) return c;
  }
  return std::nullopt;
}

std::array<double, 3> spectrum_mhz(SpectrumCase c) {
  switch (c) {
    case SpectrumCase::B1_B2_B3: return {15.0, 10.0, 5.0};
    case SpectrumCase::B1_B3_B2: return {15.0, 5.0, 10.0};
    case SpectrumCase::B2_B3_B1: return {5.0, 15.0, 10.0};
    case SpectrumCase::B3_B2_B1: return {5.0, 10.0, 15.0};
  }
  return {0.0, 0.0, 0.0};
}

NetworkModel reference_model(double lambda1_per_km2, SpectrumCase spectrum) {
  const auto bw = spectrum_mhz(spectrum);
  const double l1 = per_km2_to_per_m2(lambda1_per_km2);
  NetworkModel m;
  m.alpha = 4.0;
  m.noise_power = 0.0;
  m.mu_density = 50.0 * l1;
  m.tiers = {
      TierParams{l1, dbm_to_watts(53.0), mhz_to_hz(bw[0]), 1.0},
      TierParams{2.0 * l1, dbm_to_watts(33.0), mhz_to_hz(bw[1]), 1.0},
      TierParams{20.0 * l1, dbm_to_watts(23.0), mhz_to_hz(bw[2]), 1.0},
  };
  return m;
}

}  // namespace hetnet
