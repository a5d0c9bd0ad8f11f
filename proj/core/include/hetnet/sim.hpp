#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/stats.hpp"

namespace hetnet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Square [0, L)^2 with wrap-around distance.
class Window {
 public:
  explicit Window(double side);

  // Side such that the sparsest tier has at least min_expected BSs on average.
  static Window auto_sized(const NetworkModel& model, double min_expected = 50.0);
  // Side such that a PPP of this density has `expected` points on average.
  static Window for_count(double density, double expected);

  [[nodiscard]] double side() const { return side_; }
  [[nodiscard]] double area() const { return side_ * side_; }
  [[nodiscard]] double distance_squared(Point a, Point b) const;

 private:
  double side_;
};

using Rng = std::mt19937_64;

std::vector<Point> sample_ppp(double density, const Window& window, Rng& rng);

class NoBsInTier : public std::runtime_error {
 public:
  explicit NoBsInTier(std::size_t tier)
      : std::runtime_error("tier " + std::to_string(tier + 1) + " has no BS in the window"),
        tier_(tier) {}
  [[nodiscard]] std::size_t tier() const { return tier_; }

 private:
  std::size_t tier_;
};

class CoincidentPoints : public std::runtime_error {
 public:
  CoincidentPoints() : std::runtime_error("MU and BS positions coincide") {}
};

struct Snapshot {
  std::vector<std::vector<Point>> bs;  // [tier][index]
  std::vector<Point> mu;
  std::uint64_t seed = 0;
  Window window{1.0};
};

// Draws BS and MU point processes; a draw with an empty tier is discarded
// and redrawn from the same stream, at most max_attempts times in total.
Snapshot sample_snapshot(const NetworkModel& model, const Window& window, std::uint64_t seed,
                         int max_attempts = 10);

// Unit-mean exponential link gains, one per (MU, tier, BS) triple. Gains are
// a pure function of (seed, triple), so evaluation order does not matter.
class Fading {
 public:
  explicit Fading(std::uint64_t seed) : seed_(seed) {}
  [[nodiscard]] double gain(std::size_t mu, std::size_t tier, std::size_t bs) const {
    return gain_at(stream(mu, tier), bs);
  }
  // Hoistable part of gain() for loops over the BSs of one tier.
  [[nodiscard]] std::uint64_t stream(std::size_t mu, std::size_t tier) const;
  static double gain_at(std::uint64_t stream, std::size_t bs);

 private:
  std::uint64_t seed_;
};

// SINR of MU `mu` served by BS (tier, bs); interference from every other
// BS of the same tier.
double sinr(std::size_t mu, std::size_t tier, std::size_t bs, const Snapshot& snapshot,
            const Fading& fading, const NetworkModel& model);

// Nearest BS of one tier as seen from one MU.
struct Candidate {
  std::size_t bs = 0;
  double distance = 0.0;
  double sinr = 0.0;
};

class CandidateTable {
 public:
  CandidateTable(std::size_t mus, std::size_t tiers)
      : tiers_(tiers), data_(mus * tiers) {}
  [[nodiscard]] Candidate& at(std::size_t mu, std::size_t tier) { return data_[mu * tiers_ + tier]; }
  [[nodiscard]] const Candidate& at(std::size_t mu, std::size_t tier) const {
    return data_[mu * tiers_ + tier];
  }
  [[nodiscard]] std::size_t mu_count() const { return tiers_ == 0 ? 0 : data_.size() / tiers_; }
  [[nodiscard]] std::size_t tier_count() const { return tiers_; }

 private:
  std::size_t tiers_;
  std::vector<Candidate> data_;
};

CandidateTable build_candidates(const Snapshot& snapshot, const Fading& fading,
                                const NetworkModel& model);

struct Association {
  std::size_t tier = 0;
  std::size_t bs = 0;
  friend bool operator==(const Association&, const Association&) = default;
};

struct Assignment {
  std::vector<Association> assoc;           // per MU
  std::vector<std::vector<int>> load;       // [tier][bs]
  std::vector<double> per_mu_rate;          // nats/s under the scheme's rate metric
  bool converged = true;
  int rounds = 0;
  int switches = 0;
};

struct AssociationOptions {
  int max_rounds = 100;
  // CRE and MaxRSS compare faded instead of mean received power.
  bool rss_with_fading = false;
};

// B / (N + 1) * ln(1 + SINR), N = load excluding the evaluating MU.
inline double proposed_utility(double bandwidth, int load_excluding_self, double sinr_value) {
  return bandwidth / static_cast<double>(load_excluding_self + 1) * std::log1p(sinr_value);
}

Assignment associate(const CandidateTable& candidates, const Snapshot& snapshot,
                     const Fading& fading, const NetworkModel& model,
                     const AssociationScheme& scheme, const AssociationOptions& opt = {});

Assignment associate(const Snapshot& snapshot, const Fading& fading, const NetworkModel& model,
                     const AssociationScheme& scheme, const AssociationOptions& opt = {});

struct SimSettings {
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  std::optional<double> window_side;  // metres; auto-sized when empty
  std::size_t jobs = 1;
  AssociationOptions association;
};

struct MetricsTable {
  AssociationScheme scheme;
  std::size_t replications = 0;
  std::size_t mu_samples = 0;
  double window_side = 0.0;
  std::vector<MeanSe> tier_share;
  MeanSe rate_full_band;    // per-snapshot mean MU rate, nats/s
  MeanSe rate_equal_share;
  std::vector<MeanSe> tier_rate_full_band;  // conditional on tier
  std::vector<MeanSe> tier_rate_equal_share;
  std::vector<std::vector<std::uint64_t>> load_histogram;  // [tier][load]
  double convergence_fraction = 1.0;
  double mean_rounds = 0.0;
  // [k][j]: fraction of MUs, at the final state, whose tier-k utility beats
  // their tier-j utility. Comparable with the analytic pairwise preference.
  std::vector<std::vector<double>> preference;
  // Per-snapshot average rates, for paired comparisons between schemes.
  std::vector<double> replication_rate_full_band;
  std::vector<double> replication_rate_equal_share;

  [[nodiscard]] const MeanSe& rate(RateMetric m) const {
    return m == RateMetric::FullBand ? rate_full_band : rate_equal_share;
  }
};

// Runs every scheme on the same snapshots and fading draws.
std::vector<MetricsTable> estimate_metrics(const ValidatedModel& model,
                                           std::span<const AssociationScheme> schemes,
                                           const SimSettings& settings);

MetricsTable estimate_metrics(const ValidatedModel& model, const AssociationScheme& scheme,
                              const SimSettings& settings);

struct CoverageEstimate {
  double threshold = 0.0;
  MeanSe probability;  // per-snapshot fractions
  std::size_t samples = 0;
};

// Pr(SINR > x) for the nearest tier-k BS at uniformly placed MUs.
std::vector<CoverageEstimate> estimate_coverage(const NetworkModel& model, std::size_t k,
                                                std::span<const double> thresholds,
                                                std::size_t snapshots,
                                                std::size_t mus_per_snapshot, std::uint64_t seed,
                                                const Window& window, std::size_t jobs = 1);

// Nearest-point queries on a torus through a uniform bucket grid.
class NearestIndex {
 public:
  NearestIndex(std::span<const Point> points, const Window& window);
  // (index, squared distance) of the nearest point; points must be nonempty.
  [[nodiscard]] std::pair<std::size_t, double> nearest(Point p) const;

 private:
  std::span<const Point> points_;
  Window window_;
  std::size_t grid_ = 1;
  double cell_ = 0.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

struct CellAreaSample {
  std::vector<double> normalized_area;  // lambda_hat * area per cell
  double mean = 0.0;
  double variance = 0.0;
  std::size_t probes_per_replication = 0;
};

// Voronoi cell areas of tier k estimated on a probe grid. Areas are
// normalized by the realized density N / L^2 of each replication.
CellAreaSample estimate_cell_area_distribution(const NetworkModel& model, std::size_t k,
                                               std::size_t replications, double probes_per_km2,
                                               std::uint64_t seed, const Window& window,
                                               std::size_t jobs = 1);

struct LoadHistogram {
  std::vector<double> pmf;
  std::size_t bs_count = 0;
  double mean = 0.0;
};

// Load of tier-k BSs when MUs of intensity t_k * lambda_u attach to their
// nearest tier-k BS.
LoadHistogram estimate_thinned_load(const NetworkModel& model, std::size_t k, double t_k,
                                    std::size_t replications, std::uint64_t seed,
                                    const Window& window, std::size_t jobs = 1);

}  // namespace hetnet
