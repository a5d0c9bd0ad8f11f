#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetnet {

// Per-tier parameters, stored in SI units: density in 1/m^2, power in W,
// bandwidth in Hz. Config files use 1/km^2, dBm and MHz; conversion happens
// once, in the config loader.
struct TierParams {
  double density = 0.0;
  double tx_power = 0.0;
  double bandwidth = 0.0;
  double cre_bias = 1.0;
};

inline constexpr double kDefaultCellAreaShape = 3.575;

struct NetworkModel {
  std::vector<TierParams> tiers;
  double alpha = 4.0;
  double noise_power = 0.0;  // W
  double mu_density = 0.0;   // 1/m^2
  double cell_area_shape = kDefaultCellAreaShape;

  [[nodiscard]] std::size_t tier_count() const { return tiers.size(); }
};

enum class Scheme { Proposed, Cre, MaxRss, MaxSinr, Nearest };
enum class RateMetric { FullBand, EqualShare };

struct AssociationScheme {
  Scheme variant = Scheme::Proposed;
  RateMetric rate_metric = RateMetric::FullBand;
};

std::string_view to_string(Scheme s);
std::string_view to_string(RateMetric m);
std::optional<Scheme> parse_scheme(std::string_view name);
std::optional<RateMetric> parse_rate_metric(std::string_view name);

// Unit conversions.
double dbm_to_watts(double p_dbm);
double watts_to_dbm(double p_watts);
constexpr double per_km2_to_per_m2(double v) { return v * 1e-6; }
constexpr double per_m2_to_per_km2(double v) { return v * 1e6; }
constexpr double mhz_to_hz(double v) { return v * 1e6; }

enum class ViolationKind {
  NoTiers,
  InvalidAlpha,
  NonPositiveDensity,
  NonPositivePower,
  NonPositiveBandwidth,
  NonPositiveBias,
  NegativeNoise,
  NonPositiveMuDensity,
  NonPositiveCellAreaShape,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> tier;  // 1-based
  std::string message;
};

struct ValidationResult;
ValidationResult validate(const NetworkModel& model);

// A NetworkModel whose invariants have been checked. Only validate() can
// produce one.
class ValidatedModel {
 public:
  [[nodiscard]] const NetworkModel& get() const { return model_; }
  operator const NetworkModel&() const { return model_; }  // NOLINT
  const NetworkModel* operator->() const { return &model_; }

 private:
  friend ValidationResult validate(const NetworkModel& model);
  explicit ValidatedModel(NetworkModel m) : model_(std::move(m)) {}
  NetworkModel model_;
};

struct ValidationResult {
  std::optional<ValidatedModel> model;
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return model.has_value(); }
  // Throws std::invalid_argument listing every violation if !ok().
  [[nodiscard]] const ValidatedModel& value() const;
};

// Collects every invariant violation rather than stopping at the first.
ValidationResult validate(const NetworkModel& model);

// Named bandwidth presets for the three-tier studies.
enum class SpectrumCase { B1_B2_B3, B1_B3_B2, B2_B3_B1, B3_B2_B1 };

std::string_view to_string(SpectrumCase c);
// Accepts "B1>B2>B3" and the shell-friendly "B1_B2_B3".
std::optional<SpectrumCase> parse_spectrum_case(std::string_view name);
std::array<double, 3> spectrum_mhz(SpectrumCase c);

// Three-tier reference deployment: lambda2 = 2 lambda1, lambda3 = 20 lambda1,
// lambda_u = 50 lambda1, P = {53, 33, 23} dBm, alpha = 4, zero noise.
NetworkModel reference_model(double lambda1_per_km2 = 0.2,
                             SpectrumCase spectrum = SpectrumCase::B1_B2_B3);

}  // namespace hetnet
