#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hetnet/model.hpp"

using namespace hetnet;

namespace {

bool has(const ValidationResult& r, ViolationKind k, std::optional<std::size_t> tier = std::nullopt) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) {
    return v.kind == k && (!tier || v.tier == tier);
  });
}

}  // namespace

TEST_CASE("reference model validates") {
  const auto r = validate(reference_model());
  CHECK(r.ok());
  CHECK(r.violations.empty());
  const NetworkModel& m = r.value();
  REQUIRE(m.tier_count() == 3);
  CHECK(m.tiers[1].density == doctest::Approx(2.0 * m.tiers[0].density));
  CHECK(m.tiers[2].density == doctest::Approx(20.0 * m.tiers[0].density));
  CHECK(m.mu_density == doctest::Approx(50.0 * m.tiers[0].density));
  CHECK(m.noise_power == 0.0);
}

TEST_CASE("validation collects every violation") {
  NetworkModel m = reference_model();
  m.alpha = 2.0;
  m.noise_power = -1.0;
  m.tiers[0].density = 0.0;
  m.tiers[2].bandwidth = -5.0;
  m.tiers[1].cre_bias = 0.0;
  const auto r = validate(m);
  CHECK_FALSE(r.ok());
  CHECK(r.violations.size() == 5);
  CHECK(has(r, ViolationKind::InvalidAlpha));
  CHECK(has(r, ViolationKind::NegativeNoise));
  CHECK(has(r, ViolationKind::NonPositiveDensity, 1));
  CHECK(has(r, ViolationKind::NonPositiveBandwidth, 3));
  CHECK(has(r, ViolationKind::NonPositiveBias, 2));
  CHECK_THROWS_AS((void)r.value(), std::invalid_argument);
}

TEST_CASE("empty tier list and non-finite values are rejected") {
  NetworkModel m;
  m.mu_density = 1e-5;
  CHECK(has(validate(m), ViolationKind::NoTiers));

  m = reference_model();
  m.tiers[0].tx_power = std::nan("");
  CHECK(has(validate(m), ViolationKind::NonPositivePower, 1));
  m = reference_model();
  m.alpha = INFINITY;
  CHECK(has(validate(m), ViolationKind::InvalidAlpha));
  m = reference_model();
  m.mu_density = 0.0;
  CHECK(has(validate(m), ViolationKind::NonPositiveMuDensity));
  m = reference_model();
  m.cell_area_shape = -1.0;
  CHECK(has(validate(m), ViolationKind::NonPositiveCellAreaShape));
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(watts_to_dbm(dbm_to_watts(23.0)) == doctest::Approx(23.0));
  CHECK(per_km2_to_per_m2(1.0) == doctest::Approx(1e-6));
  CHECK(mhz_to_hz(15.0) == doctest::Approx(15e6));
}

TEST_CASE("enum names round-trip") {
  for (auto s : {Scheme::Proposed, Scheme::Cre, Scheme::MaxRss, Scheme::MaxSinr, Scheme::Nearest}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  for (auto m : {RateMetric::FullBand, RateMetric::EqualShare}) {
    CHECK(parse_rate_metric(to_string(m)) == m);
  }
  for (auto c : {SpectrumCase::B1_B2_B3, SpectrumCase::B1_B3_B2, SpectrumCase::B2_B3_B1,
                 SpectrumCase::B3_B2_B1}) {
    CHECK(parse_spectrum_case(to_string(c)) == c);
  }
  CHECK(parse_spectrum_case("B3_B2_B1") == SpectrumCase::B3_B2_B1);
  CHECK_FALSE(parse_scheme("greedy").has_value());
  CHECK_FALSE(parse_spectrum_case("B1>B1>B1").has_value());
}

TEST_CASE("spectrum presets") {
  using A = std::array<double, 3>;
  CHECK(spectrum_mhz(SpectrumCase::B1_B2_B3) == A{15, 10, 5});
  CHECK(spectrum_mhz(SpectrumCase::B1_B3_B2) == A{15, 5, 10});
  CHECK(spectrum_mhz(SpectrumCase::B2_B3_B1) == A{5, 15, 10});
  CHECK(spectrum_mhz(SpectrumCase::B3_B2_B1) == A{5, 10, 15});
  const auto m = reference_model(0.3, SpectrumCase::B3_B2_B1);
  CHECK(m.tiers[0].bandwidth == doctest::Approx(5e6));
  CHECK(m.tiers[2].bandwidth == doctest::Approx(15e6));
  CHECK(m.tiers[0].tx_power == doctest::Approx(dbm_to_watts(53.0)));
}
