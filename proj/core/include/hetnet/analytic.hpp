#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

// ---------------------------------------------------------------------------
// Interference functional and the SINR law of the nearest tier-k BS.
//
// With Rayleigh fading and intra-tier interference only, the SINR from the
// nearest tier-k BS has CCDF
//
//   Pc_k(x) = int_0^inf exp(-u (1 + phi(x))) exp(-(u / (pi l_k))^(a/2) x s2 / P_k) du
//
// (u = pi l_k r^2), where phi(x) = x^(2/a) int_{x^(-2/a)}^inf dy / (1 + y^(a/2)).
// For zero noise Pc_k(x) = 1 / (1 + phi(x)) independent of density and power.
// ---------------------------------------------------------------------------

// phi(x). Evaluated through its hypergeometric series, accurate to a few ulps.
double varphi(double x, double alpha);

// phi(x) by adaptive quadrature of its defining integral.
double varphi_quadrature(double x, double alpha, const QuadSettings& q = {});

// (2/a) [phi(x)/x + 1/(1+x)]; the x -> 0 limit 2/(a-2) is returned at x = 0.
double varphi_prime(double x, double alpha);

double coverage_probability(const NetworkModel& model, std::size_t k, double x,
                            const QuadSettings& q = {});

double sinr_pdf(const NetworkModel& model, std::size_t k, double x, const QuadSettings& q = {});

// Density of ln(1 + SINR_k): e^y f_SINR(e^y - 1).
double lnsinr_pdf(const NetworkModel& model, std::size_t k, double y, const QuadSettings& q = {});

// Density of ln(1 + SINR_k) / ln(1 + SINR_j) at z, as the quotient integral
// int_0^inf y e^{(z+1) y} f_k(e^{zy} - 1) f_j(e^y - 1) dy. Requires k != j.
double sinr_ratio_pdf(const NetworkModel& model, std::size_t k, std::size_t j, double z,
                      const QuadSettings& q = {});

// CDF of the same ratio computed without the density:
// Pr(ratio <= w) = int_0^inf f_{ln(1+SINR_j)}(y) (1 - Pc_k(e^{wy} - 1)) dy.
double sinr_ratio_cdf(const NetworkModel& model, std::size_t k, std::size_t j, double w,
                      const QuadSettings& q = {});

// ---------------------------------------------------------------------------
// Load of a tier-k BS. Users associated with tier k form a thinned PPP of
// intensity t_k l_u; with a Gamma(c, c l_k) cell area the count is negative
// binomial with shape c and success probability p = t_k l_u / (t_k l_u + c l_k).
// ---------------------------------------------------------------------------

// Single pmf term through log-gamma.
double load_pmf(const NetworkModel& model, std::size_t k, double t_k, long n);

// Sum of load_pmf over 0..l (0 for l < 0).
double load_cdf(const NetworkModel& model, std::size_t k, double t_k, long l);

// The load pmf tabulated by recurrence up to the point where the remaining
// tail mass falls below tail_tol.
class LoadDistribution {
 public:
  LoadDistribution(double t_k, double mu_density, double bs_density, double shape,
                   double tail_tol);
  LoadDistribution(const NetworkModel& model, std::size_t k, double t_k, double tail_tol);

  [[nodiscard]] double pmf(long n) const;
  [[nodiscard]] double cdf(long l) const;
  [[nodiscard]] double mean() const { return mean_; }
  // Number of tabulated terms (support 0..size()-1).
  [[nodiscard]] std::size_t size() const { return pmf_.size(); }
  [[nodiscard]] std::span<const double> pmf_table() const { return pmf_; }
  [[nodiscard]] std::span<const double> cdf_table() const { return cdf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

// floor(m * x) computed without the rounding error of the product.
long exact_floor_product(long m, double x);

// CDF of (N_k + 1) / (N_j + 1):
//   sum_t F_{N_k}(floor((t + 1) x - 1)) f_{N_j}(t), with F(l < 0) = 0,
// truncated once the N_j tail is below q.series_tail_tol.
double load_ratio_cdf(const NetworkModel& model, std::size_t k, std::size_t j,
                      std::span<const double> t, double x, const QuadSettings& q = {});

// ---------------------------------------------------------------------------
// Tabulated CDF of ln(1+SINR_k) / ln(1+SINR_j), built once per model by
// integrating sinr_ratio_pdf cell by cell on a uniform grid in ln z. It does
// not depend on the association probabilities, so the fixed point reuses it.
// ---------------------------------------------------------------------------
class RatioCdfTable {
 public:
  RatioCdfTable(const NetworkModel& model, std::size_t k, std::size_t j, const QuadSettings& q);

  // Pr(ratio <= w).
  [[nodiscard]] double cdf(double w) const;
  // Total mass captured by the table (1 up to quadrature and tail error).
  [[nodiscard]] double mass() const { return mass_; }
  [[nodiscard]] double log_min() const { return v0_; }
  [[nodiscard]] double log_max() const { return v0_ + step_ * static_cast<double>(cdf_.size() - 1); }

 private:
  double cdf_log(double v) const;

  double v0_ = 0.0;
  double step_ = 0.0;
  std::vector<double> cdf_;
  std::vector<double> density_;  // density of ln(ratio) at the nodes
  double mass_ = 0.0;
};

// Ratio law of tiers (k, j), shared between (k, j) and (j, k) and cached
// per process by the parameters that determine the two SINR laws.
class RatioLaw {
 public:
  RatioLaw(std::shared_ptr<const RatioCdfTable> table, bool inverted)
      : table_(std::move(table)), inverted_(inverted) {}
  [[nodiscard]] double cdf(double w) const;

 private:
  std::shared_ptr<const RatioCdfTable> table_;
  bool inverted_;
};

RatioLaw ratio_law(const NetworkModel& model, std::size_t k, std::size_t j, const QuadSettings& q);

// Pr[(N_k + 1)/(N_j + 1) < (B_k / B_j) ln(1+SINR_k)/ln(1+SINR_j)]
//   = int_0^inf F_{N_k/j}((B_k/B_j) x) f_{SINR_k/j}(x) dx.
// F is a step function of x with jumps at (n+1)/((B_k/B_j)(t+1)); the integral
// is taken exactly piece by piece, i.e. as
//   sum_{n,t} f_{N_k}(n) f_{N_j}(t) Pr[ratio >= (n+1) / ((B_k/B_j)(t+1))].
double pairwise_preference(const NetworkModel& model, std::size_t k, std::size_t j,
                           std::span<const double> t, const QuadSettings& q = {});

// Same quantity against an already built ratio law and load distributions.
double pairwise_preference(const RatioLaw& law, double bandwidth_ratio,
                           const LoadDistribution& load_k, const LoadDistribution& load_j);

// ---------------------------------------------------------------------------
// Tier association probabilities.
// ---------------------------------------------------------------------------
struct FixedPointOptions {
  double tol = 1e-6;
  int max_iter = 200;
  double damping = 0.5;
  // Iterate on G(T) / sum G(T). With false, the raw product map is iterated
  // and sum(T) drifts away from 1 by the independence error.
  bool normalize = true;
  // Starting point; uniform when empty.
  std::vector<double> initial;
};

struct TierProbabilities {
  std::vector<double> t;
  // Raw product map G(T) at the returned T.
  std::vector<double> raw;
  double residual = 0.0;
  // |sum_k G_k(T) - 1|: mass defect of the product form.
  double sum_deviation = 0.0;
  int iterations = 0;
  bool converged = false;
};

// G_k(T) = prod_{j != k} pairwise_preference(k, j, T). Exposed for tests.
std::vector<double> association_map(const NetworkModel& model, std::span<const double> t,
                                    const QuadSettings& q = {});

// Damped fixed-point iteration T <- (1-d) T + d G(T). Never throws for
// non-convergence: the last iterate is returned with converged = false.
TierProbabilities solve_tier_probabilities(const ValidatedModel& model, const QuadSettings& q = {},
                                           const FixedPointOptions& opt = {});

// ---------------------------------------------------------------------------
// Ergodic rates (nats/s).
// ---------------------------------------------------------------------------

// int_0^inf Pc_k(e^t - 1) dt = E[ln(1 + SINR_k)], nats/s/Hz.
double spectral_efficiency(const NetworkModel& model, std::size_t k, const QuadSettings& q = {});

// B_k E[ln(1 + SINR_k)].
double ergodic_rate_conditional(const NetworkModel& model, std::size_t k,
                                const QuadSettings& q = {});

// E[1 / (N_k + 1)] under the load pmf with association probability t_k.
double equal_share_factor(const NetworkModel& model, std::size_t k, double t_k,
                          const QuadSettings& q = {});

struct RateReport {
  RateMetric metric = RateMetric::FullBand;
  std::vector<double> per_tier_rate;
  double average_rate = 0.0;
  TierProbabilities tier_probs;
};

RateReport average_ergodic_rate(const ValidatedModel& model, const QuadSettings& q = {},
                                RateMetric metric = RateMetric::FullBand,
                                const FixedPointOptions& opt = {});

}  // namespace hetnet
