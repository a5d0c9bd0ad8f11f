#include "hetnet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hetnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing "# ..." comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct RawValue {
  std::string text;
  bool quoted = false;
  int line = 0;
};

double parse_number(const std::string& key, const RawValue& v) {
  if (v.quoted) throw ConfigError(key, "key '" + key + "' expects a number", v.line);
  double out = 0.0;
  std::string text = v.text;
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError(key, "key '" + key + "' has malformed number '" + v.text + "'", v.line);
  }
  return out;
}

using Section = std::map<std::string, RawValue>;

const std::set<std::string> kNetworkKeys = {"alpha", "noise_dbm", "mu_density_per_km2",
                                            "cell_area_shape"};
const std::set<std::string> kTierKeys = {"density_per_km2", "power_dbm", "bandwidth_mhz",
                                         "cre_bias"};

double required(const Section& s, const std::string& prefix, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end()) throw ConfigError(prefix + key, "missing required key '" + prefix + key + "'");
  return parse_number(prefix + key, it->second);
}

double optional_number(const Section& s, const std::string& prefix, const std::string& key,
                       double fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : parse_number(prefix + key, it->second);
}

// "tier[2].power_dbm" -> (2, "power_dbm"); 0 when not a tier path.
std::pair<std::size_t, std::string> split_tier_target(std::string_view target) {
  constexpr std::string_view prefix = "tier[";
  if (target.substr(0, prefix.size()) != prefix) return {0, {}};
  const auto close = target.find("].");
  if (close == std::string_view::npos) return {0, {}};
  std::size_t index = 0;
  const auto digits = target.substr(prefix.size(), close - prefix.size());
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return {0, {}};
  return {index, std::string(target.substr(close + 2))};
}

double* resolve(ConfigDoc& doc, std::string_view target) {
  if (target == "network.alpha") return &doc.alpha;
  if (target == "network.mu_density_per_km2") return &doc.mu_density_per_km2;
  if (target == "network.cell_area_shape") return &doc.cell_area_shape;
  auto [index, field] = split_tier_target(target);
  if (index == 0 || index > doc.tiers.size()) return nullptr;
  auto& tier = doc.tiers[index - 1];
  if (field == "density_per_km2") return &tier.density_per_km2;
  if (field == "power_dbm") return &tier.power_dbm;
  if (field == "bandwidth_mhz") return &tier.bandwidth_mhz;
  if (field == "cre_bias") return &tier.cre_bias;
  return nullptr;
}

}  // namespace

ConfigDoc parse_config(std::string_view text) {
  Section network;
  bool have_network = false;
  std::vector<Section> tiers;
  Section* current = nullptr;
  const std::set<std::string>* allowed = nullptr;
  std::string section_name;

  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const auto line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line == "[network]") {
      if (have_network) throw ConfigError("network", "duplicate [network] section", line_no);
      have_network = true;
      current = &network;
      allowed = &kNetworkKeys;
      section_name = "network.";
      continue;
    }
    if (line == "[[tier]]") {
      tiers.emplace_back();
      current = &tiers.back();
      allowed = &kTierKeys;
      section_name = "tier[" + std::to_string(tiers.size()) + "].";
      continue;
    }
    if (line.front() == '[') {
      throw ConfigError(std::string(line), "unknown section " + std::string(line), line_no);
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "expected 'key = value' on line " + std::to_string(line_no),
                        line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (current == nullptr) {
      throw ConfigError(key, "key '" + key + "' appears before any section", line_no);
    }
    if (allowed->count(key) == 0) {
      throw ConfigError(section_name + key, "unknown key '" + section_name + key + "'", line_no);
    }
    RawValue rv;
    rv.line = line_no;
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ConfigError(section_name + key, "unterminated string for '" + key + "'", line_no);
      }
      rv.text = std::string(value.substr(1, value.size() - 2));
      rv.quoted = true;
    } else {
      rv.text = std::string(value);
    }
    if (!current->emplace(key, rv).second) {
      throw ConfigError(section_name + key, "duplicate key '" + section_name + key + "'", line_no);
    }
  }

  if (!have_network) throw ConfigError("network", "missing [network] section");
  if (tiers.empty()) throw ConfigError("tier", "at least one [[tier]] section is required");

  ConfigDoc doc;
  doc.alpha = required(network, "network.", "alpha");
  doc.mu_density_per_km2 = required(network, "network.", "mu_density_per_km2");
  doc.cell_area_shape = optional_number(network, "network.", "cell_area_shape", kDefaultCellAreaShape);
  if (auto it = network.find("noise_dbm"); it != network.end()) {
    if (it->second.quoted) {
      if (it->second.text != "zero") {
        throw ConfigError("network.noise_dbm", "noise_dbm must be a number or \"zero\"", it->second.line);
      }
    } else {
      doc.noise_dbm = parse_number("network.noise_dbm", it->second);
    }
  }
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    const std::string prefix = "tier[" + std::to_string(i + 1) + "].";
    TierConfig t;
    t.density_per_km2 = required(tiers[i], prefix, "density_per_km2");
    t.power_dbm = required(tiers[i], prefix, "power_dbm");
    t.bandwidth_mhz = required(tiers[i], prefix, "bandwidth_mhz");
    t.cre_bias = optional_number(tiers[i], prefix, "cre_bias", 1.0);
    doc.tiers.push_back(t);
  }
  return doc;
}

ConfigDoc load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

NetworkModel to_model(const ConfigDoc& doc) {
  NetworkModel m;
  m.alpha = doc.alpha;
  m.noise_power = doc.noise_dbm ? dbm_to_watts(*doc.noise_dbm) : 0.0;
  m.mu_density = per_km2_to_per_m2(doc.mu_density_per_km2);
  m.cell_area_shape = doc.cell_area_shape;
  for (const auto& t : doc.tiers) {
    m.tiers.push_back(TierParams{per_km2_to_per_m2(t.density_per_km2), dbm_to_watts(t.power_dbm),
                                 mhz_to_hz(t.bandwidth_mhz), t.cre_bias});
  }
  return m;
}

void apply_override(ConfigDoc& doc, std::string_view target, double value) {
  if (target == "network.noise_dbm") {
    doc.noise_dbm = value;
    return;
  }
  double* slot = resolve(doc, target);
  if (slot == nullptr) {
    throw ConfigError(std::string(target), "sweep target '" + std::string(target) + "' does not resolve");
  }
  *slot = value;
}

double read_target(const ConfigDoc& doc, std::string_view target) {
  if (target == "network.noise_dbm") {
    if (!doc.noise_dbm) throw ConfigError(std::string(target), "noise is configured as zero");
    return *doc.noise_dbm;
  }
  ConfigDoc copy = doc;
  const double* slot = resolve(copy, target);
  if (slot == nullptr) {
    throw ConfigError(std::string(target), "target '" + std::string(target) + "' does not resolve");
  }
  return *slot;
}

void apply_spectrum(ConfigDoc& doc, SpectrumCase c) {
  if (doc.tiers.size() != 3) {
    throw ConfigError("spectrum_case", "spectrum presets need exactly 3 tiers");
  }
  const auto bw = spectrum_mhz(c);
  for (std::size_t i = 0; i < 3; ++i) doc.tiers[i].bandwidth_mhz = bw[i];
}

ConfigDoc reference_config(double lambda1_per_km2, SpectrumCase spectrum) {
  ConfigDoc doc;
  doc.alpha = 4.0;
  doc.mu_density_per_km2 = 50.0 * lambda1_per_km2;
  const auto bw = spectrum_mhz(spectrum);
  doc.tiers = {
      TierConfig{lambda1_per_km2, 53.0, bw[0], 1.0},
      TierConfig{2.0 * lambda1_per_km2, 33.0, bw[1], 1.0},
      TierConfig{20.0 * lambda1_per_km2, 23.0, bw[2], 1.0},
  };
  return doc;
}

std::string to_toml(const ConfigDoc& doc) {
  std::ostringstream out;
  out.precision(17);
  out << "[network]\n";
  out << "alpha = " << doc.alpha << "\n";
  if (doc.noise_dbm) {
    out << "noise_dbm = " << *doc.noise_dbm << "\n";
  } else {
    out << "noise_dbm = \"zero\"\n";
  }
  out << "mu_density_per_km2 = " << doc.mu_density_per_km2 << "\n";
  out << "cell_area_shape = " << doc.cell_area_shape << "\n";
  for (const auto& t : doc.tiers) {
    out << "\n[[tier]]\n";
    out << "density_per_km2 = " << t.density_per_km2 << "\n";
    out << "power_dbm = " << t.power_dbm << "\n";
    out << "bandwidth_mhz = " << t.bandwidth_mhz << "\n";
    out << "cre_bias = " << t.cre_bias << "\n";
  }
  return out.str();
}

}  // namespace hetnet
