#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/model.hpp"

namespace hetnet {

// Config file schema (TOML subset):
//
//   [network]
//   alpha = 4.0
//   noise_dbm = "zero"          # or a number in dBm
//   mu_density_per_km2 = 10.0
//   cell_area_shape = 3.575     # optional
//
//   [[tier]]                    # repeated, in tier order
//   density_per_km2 = 0.2
//   power_dbm = 53
//   bandwidth_mhz = 15
//   cre_bias = 1.0              # optional
//
// Unknown sections or keys, duplicate keys and missing required keys are
// errors.

struct TierConfig {
  double density_per_km2 = 0.0;
  double power_dbm = 0.0;
  double bandwidth_mhz = 0.0;
  double cre_bias = 1.0;
};

struct ConfigDoc {
  double alpha = 4.0;
  std::optional<double> noise_dbm;  // empty = zero noise
  double mu_density_per_km2 = 0.0;
  double cell_area_shape = kDefaultCellAreaShape;
  std::vector<TierConfig> tiers;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message, int line = 0)
      : std::runtime_error(message), key_(std::move(key)), line_(line) {}
  [[nodiscard]] const std::string& key() const { return key_; }
  [[nodiscard]] int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

ConfigDoc parse_config(std::string_view text);
ConfigDoc load_config(const std::filesystem::path& path);

// Converts to SI units (1/m^2, W, Hz).
NetworkModel to_model(const ConfigDoc& doc);

// Dotted targets: network.alpha, network.noise_dbm, network.mu_density_per_km2,
// network.cell_area_shape, tier[i].<field> with 1-based i.
void apply_override(ConfigDoc& doc, std::string_view target, double value);
double read_target(const ConfigDoc& doc, std::string_view target);

// Sets the three tier bandwidths to a named preset; needs exactly 3 tiers.
void apply_spectrum(ConfigDoc& doc, SpectrumCase c);

// Reference deployment as a config document.
ConfigDoc reference_config(double lambda1_per_km2 = 0.2,
                           SpectrumCase spectrum = SpectrumCase::B1_B2_B3);

std::string to_toml(const ConfigDoc& doc);

}  // namespace hetnet
