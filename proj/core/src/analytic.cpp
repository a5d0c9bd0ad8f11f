#include "hetnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <tuple>

#include <boost/math/quadrature/gauss.hpp>

namespace hetnet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// exp() underflows to zero below this.
constexpr double kMinExponent = -745.0;
// e^y overflows above this; every density handled here is negligible there.
constexpr double kMaxLogArgument = 700.0;

void check_alpha(double alpha) {
  if (!(alpha > 2.0)) throw std::domain_error("path-loss exponent must exceed 2");
}

void check_tier(const NetworkModel& m, std::size_t k) {
  if (k >= m.tier_count()) throw std::out_of_range("tier index out of range");
}

// sum_{n>=0} n! / (b+1)_n w^n, the Pfaff-transformed 2F1(1, 1; b+1; w).
// Only called with 0 <= w <= 1/2, where it converges at least as fast as 2^-n.
double pfaff_series(double w, double b) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 400; ++n) {
    term *= (n + 1.0) / (n + 1.0 + b) * w;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// phi(x) / x for 0 <= x <= 1:
// (2/(a-2)) 2F1(1, 1-2/a; 2-2/a; -x) = (2/(a-2)) (1+x)^-1 S(x/(1+x); 1-2/a).
double varphi_over_x_small(double x, double alpha) {
  return 2.0 / (alpha - 2.0) / (1.0 + x) * pfaff_series(x / (1.0 + x), 1.0 - 2.0 / alpha);
}

// phi(x) for x > 1 from the complement of int_0^{x^-2/a}:
// C x^(2/a) - 2F1(1, 2/a; 1+2/a; -1/x), C = (pi/d) / sin(pi/d), d = a/2.
double varphi_large(double x, double alpha) {
  const double d = 0.5 * alpha;
  const double c = (kPi / d) / std::sin(kPi / d);
  return std::pow(x, 2.0 / alpha) * c - x / (1.0 + x) * pfaff_series(1.0 / (1.0 + x), 2.0 / alpha);
}

// Parameters that fully determine the SINR law of a tier. With zero noise the
// law depends on alpha only.
struct TierLaw {
  double alpha = 4.0;
  double noise_over_power = 0.0;
  double density = 0.0;

  auto key() const { return std::make_tuple(alpha, noise_over_power, density); }
};

TierLaw tier_law(const NetworkModel& m, std::size_t k) {
  check_tier(m, k);
  check_alpha(m.alpha);
  if (m.noise_power == 0.0) return TierLaw{m.alpha, 0.0, 0.0};
  return TierLaw{m.alpha, m.noise_power / m.tiers[k].tx_power, m.tiers[k].density};
}

QuadSettings inner_settings(const QuadSettings& q) {
  QuadSettings inner = q;
  inner.rel_tol = std::max(q.rel_tol * 1e-3, 1e-14);
  inner.abs_tol = std::max(q.abs_tol * 1e-3, 1e-300);
  return inner;
}

// Breakpoint scale for an integrand with e^-v decay plus e^-(beta v^(a/2)).
double noise_scale(double beta, double alpha) {
  return beta > 1.0 ? std::pow(beta, -2.0 / alpha) : 1.0;
}

double coverage(const TierLaw& law, double x, const QuadSettings& q) {
  if (!(x >= 0.0)) throw std::domain_error("coverage: threshold must be >= 0");
  if (std::isinf(x)) return 0.0;
  const double a = 1.0 + varphi(x, law.alpha);
  if (law.noise_over_power == 0.0 || x == 0.0) return 1.0 / a;
  // u = pi l r^2, v = a u: Pc = (1/a) int e^{-v - beta v^(a/2)} dv.
  const double half = 0.5 * law.alpha;
  const double beta = x * law.noise_over_power * std::pow(kPi * law.density * a, -half);
  auto f = [&](double v) {
    const double e = -v - beta * std::pow(v, half);
    return e < kMinExponent ? 0.0 : std::exp(e);
  };
  const auto pts = geometric_breakpoints(noise_scale(beta, law.alpha));
  return integrate(f, pts, q).value / a;
}

double density(const TierLaw& law, double x, const QuadSettings& q) {
  if (!(x >= 0.0)) throw std::domain_error("sinr_pdf: argument must be >= 0");
  if (std::isinf(x)) return 0.0;
  const double a = 1.0 + varphi(x, law.alpha);
  const double dphi = varphi_prime(x, law.alpha);
  if (law.noise_over_power == 0.0) return dphi / (a * a);
  const double half = 0.5 * law.alpha;
  const double gamma = law.noise_over_power * std::pow(kPi * law.density * a, -half);
  const double beta = x * gamma;
  auto f = [&](double v) {
    const double vh = std::pow(v, half);
    const double e = -v - beta * vh;
    if (e < kMinExponent) return 0.0;
    return (v / a * dphi + gamma * vh) * std::exp(e);
  };
  const auto pts = geometric_breakpoints(noise_scale(beta, law.alpha));
  return integrate(f, pts, q).value / a;
}

double ln_density(const TierLaw& law, double y, const QuadSettings& q) {
  if (!(y >= 0.0) || y > kMaxLogArgument) return 0.0;
  return std::exp(y) * density(law, std::expm1(y), q);
}

int breakpoint_count(double scale, double reach) {
  return std::max(4, static_cast<int>(std::ceil(std::log(reach / scale) / std::log(4.0))) + 1);
}

double ratio_density(const TierLaw& lk, const TierLaw& lj, double z, const QuadSettings& q) {
  if (!(z >= 0.0)) throw std::domain_error("sinr_ratio_pdf: argument must be >= 0");
  if (std::isinf(z)) return 0.0;
  const QuadSettings inner = inner_settings(q);
  auto f = [&](double y) {
    const double gk = ln_density(lk, z * y, inner);
    if (gk == 0.0) return 0.0;
    return y * gk * ln_density(lj, y, inner);
  };
  const double scale = z > 1.0 ? 1.0 / z : 1.0;
  const auto pts = geometric_breakpoints(scale, breakpoint_count(scale, 64.0 * lj.alpha));
  return integrate(f, pts, q).value;
}

double ratio_cdf(const TierLaw& lk, const TierLaw& lj, double w, const QuadSettings& q) {
  if (!(w >= 0.0)) throw std::domain_error("sinr_ratio_cdf: argument must be >= 0");
  if (w == 0.0) return 0.0;
  if (std::isinf(w)) return 1.0;
  const QuadSettings inner = inner_settings(q);
  auto f = [&](double y) {
    const double g = ln_density(lj, y, inner);
    if (g == 0.0) return 0.0;
    const double wy = w * y;
    const double below = wy > kMaxLogArgument ? 1.0 : 1.0 - coverage(lk, std::expm1(wy), inner);
    return g * below;
  };
  const double scale = w > 1.0 ? 1.0 / w : 1.0;
  const auto pts = geometric_breakpoints(scale, breakpoint_count(scale, 64.0 * lj.alpha));
  return std::clamp(integrate(f, pts, q).value, 0.0, 1.0);
}

void check_pair(const NetworkModel& m, std::size_t k, std::size_t j) {
  check_tier(m, k);
  check_tier(m, j);
  if (k == j) throw std::invalid_argument("ratio distributions need two distinct tiers");
}

}  // namespace

// ---------------------------------------------------------------------------

double varphi(double x, double alpha) {
  check_alpha(alpha);
  if (!(x >= 0.0)) throw std::domain_error("varphi: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kInf;
  return x <= 1.0 ? x * varphi_over_x_small(x, alpha) : varphi_large(x, alpha);
}

double varphi_quadrature(double x, double alpha, const QuadSettings& q) {
  check_alpha(alpha);
  if (!(x >= 0.0)) throw std::domain_error("varphi: x must be >= 0");
  if (x == 0.0) return 0.0;
  // y = e^u turns the algebraic y^(-a/2) tail into an exponential one.
  const double log_lower = -2.0 / alpha * std::log(x);
  const double half = 0.5 * alpha;
  auto f = [half](double u) { return 1.0 / (std::exp(-u) + std::exp((half - 1.0) * u)); };
  const double pts_small[] = {log_lower, 0.0, kInf};
  const double pts_large[] = {log_lower, kInf};
  const auto pts =
      log_lower < 0.0 ? std::span<const double>(pts_small) : std::span<const double>(pts_large);
  return std::pow(x, 2.0 / alpha) * integrate(f, pts, q).value;
}

double varphi_prime(double x, double alpha) {
  check_alpha(alpha);
  if (!(x >= 0.0)) throw std::domain_error("varphi_prime: x must be >= 0");
  if (x == 0.0) return 2.0 / (alpha - 2.0);
  if (std::isinf(x)) return 0.0;
  const double phi_over_x = x <= 1.0 ? varphi_over_x_small(x, alpha) : varphi_large(x, alpha) / x;
  return 2.0 / alpha * (phi_over_x + 1.0 / (1.0 + x));
}

double coverage_probability(const NetworkModel& model, std::size_t k, double x, const QuadSettings& q) {
  return coverage(tier_law(model, k), x, q);
}

double sinr_pdf(const NetworkModel& model, std::size_t k, double x, const QuadSettings& q) {
  return density(tier_law(model, k), x, q);
}

double lnsinr_pdf(const NetworkModel& model, std::size_t k, double y, const QuadSettings& q) {
  return ln_density(tier_law(model, k), y, q);
}

double sinr_ratio_pdf(const NetworkModel& model, std::size_t k, std::size_t j, double z,
                      const QuadSettings& q) {
  check_pair(model, k, j);
  return ratio_density(tier_law(model, k), tier_law(model, j), z, q);
}

double sinr_ratio_cdf(const NetworkModel& model, std::size_t k, std::size_t j, double w,
                      const QuadSettings& q) {
  check_pair(model, k, j);
  return ratio_cdf(tier_law(model, k), tier_law(model, j), w, q);
}

// ---------------------------------------------------------------------------
// Load distribution

double load_pmf(const NetworkModel& model, std::size_t k, double t_k, long n) {
  check_tier(model, k);
  if (!(t_k >= 0.0 && t_k <= 1.0)) throw std::domain_error("load_pmf: t_k must lie in [0, 1]");
  if (n < 0) return 0.0;
  if (t_k == 0.0) return n == 0 ? 1.0 : 0.0;
  const double c = model.cell_area_shape;
  const double users = t_k * model.mu_density;
  const double cells = c * model.tiers[k].density;
  const double nn = static_cast<double>(n);
  const double log_pmf = nn * std::log(users) + c * std::log(cells) - (nn + c) * std::log(users + cells) +
                         std::lgamma(nn + c) - std::lgamma(nn + 1.0) - std::lgamma(c);
  return std::exp(log_pmf);
}

double load_cdf(const NetworkModel& model, std::size_t k, double t_k, long l) {
  double sum = 0.0;
  for (long n = 0; n <= l; ++n) sum += load_pmf(model, k, t_k, n);
  return std::min(sum, 1.0);
}

LoadDistribution::LoadDistribution(double t_k, double mu_density, double bs_density, double shape,
                                   double tail_tol) {
  if (!(t_k >= 0.0 && t_k <= 1.0)) throw std::domain_error("LoadDistribution: t_k must lie in [0, 1]");
  if (t_k == 0.0) {
    pmf_ = {1.0};
    cdf_ = {1.0};
    return;
  }
  const double users = t_k * mu_density;
  const double cells = shape * bs_density;
  const double log_total = std::log(users + cells);
  const double log_p = std::log(users) - log_total;
  const double p = std::exp(log_p);
  double log_term = shape * (std::log(cells) - log_total);
  double cum = 0.0;
  const double expected = shape * p / (1.0 - p);
  for (long n = 0;; ++n) {
    const double term = std::exp(log_term);
    const double nn = static_cast<double>(n);
    pmf_.push_back(term);
    cum += term;
    cdf_.push_back(std::min(cum, 1.0));
    mean_ += nn * term;
    // Successive-term ratios are bounded by r from here on, so the tail is
    // at most term * r / (1 - r).
    const double r = p * std::max((nn + 1.0 + shape) / (nn + 2.0), 1.0);
    if (nn > expected && r < 1.0 && term * r / (1.0 - r) <= tail_tol) break;
    if (n > 50'000'000) throw std::runtime_error("LoadDistribution: series does not terminate");
    log_term += log_p + std::log((nn + shape) / (nn + 1.0));
  }
}

LoadDistribution::LoadDistribution(const NetworkModel& model, std::size_t k, double t_k, double tail_tol)
    : LoadDistribution(t_k, model.mu_density, model.tiers.at(k).density, model.cell_area_shape,
                       tail_tol) {}

double LoadDistribution::pmf(long n) const {
  if (n < 0 || static_cast<std::size_t>(n) >= pmf_.size()) return 0.0;
  return pmf_[static_cast<std::size_t>(n)];
}

double LoadDistribution::cdf(long l) const {
  if (l < 0) return 0.0;
  if (static_cast<std::size_t>(l) >= cdf_.size()) return cdf_.back();
  return cdf_[static_cast<std::size_t>(l)];
}

long exact_floor_product(long m, double x) {
  const double md = static_cast<double>(m);
  const double prod = md * x;
  if (!(std::abs(prod) < 4e18)) return prod > 0 ? std::numeric_limits<long>::max() / 2
                                               : std::numeric_limits<long>::min() / 2;
  const double fl = std::floor(prod);
  // The residual of the rounded product is exact under fma.
  const double err = std::fma(md, x, -prod);
  long result = static_cast<long>(fl);
  if (prod == fl && err < 0.0) --result;
  return result;
}

double load_ratio_cdf(const NetworkModel& model, std::size_t k, std::size_t j,
                      std::span<const double> t, double x, const QuadSettings& q) {
  check_pair(model, k, j);
  if (t.size() != model.tier_count()) throw std::invalid_argument("load_ratio_cdf: wrong T length");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const LoadDistribution nk(model, k, t[k], q.series_tail_tol);
  const LoadDistribution nj(model, j, t[j], q.series_tail_tol);
  double sum = 0.0;
  for (std::size_t tt = 0; tt < nj.size(); ++tt) {
    const long l = exact_floor_product(static_cast<long>(tt) + 1, x) - 1;
    sum += nk.cdf(l) * nj.pmf(static_cast<long>(tt));
  }
  return std::clamp(sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Ratio CDF table

namespace {
constexpr double kTableHalfWidth = 32.0;  // ln z in [-32, 32]; tails there are ~e^-32
constexpr double kTableStep = 0.05;
}  // namespace

RatioCdfTable::RatioCdfTable(const NetworkModel& model, std::size_t k, std::size_t j,
                             const QuadSettings& q) {
  check_tier(model, k);
  check_tier(model, j);
  const TierLaw lk = tier_law(model, k);
  const TierLaw lj = tier_law(model, j);
  auto h = [&](double v) {
    const double z = std::exp(v);
    return z * ratio_density(lk, lj, z, q);
  };
  const auto cells = static_cast<std::size_t>(std::lround(2.0 * kTableHalfWidth / kTableStep));
  v0_ = -kTableHalfWidth;
  step_ = 2.0 * kTableHalfWidth / static_cast<double>(cells);
  density_.resize(cells + 1);
  cdf_.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) density_[i] = h(v0_ + step_ * static_cast<double>(i));
  // The density of ln(ratio) decays like e^{-|v|} in both tails.
  double cum = density_.front();
  cdf_[0] = cum;
  using Gauss = boost::math::quadrature::gauss<double, 8>;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = v0_ + step_ * static_cast<double>(i);
    cum += Gauss::integrate(h, a, a + step_);
    cdf_[i + 1] = cum;
  }
  mass_ = cum + density_.back();
}

double RatioCdfTable::cdf_log(double v) const {
  const double vmax = log_max();
  if (v <= v0_) return cdf_.front() * std::exp(v - v0_);
  if (v >= vmax) return mass_ - (mass_ - cdf_.back()) * std::exp(vmax - v);
  const double pos = (v - v0_) / step_;
  auto i = static_cast<std::size_t>(pos);
  if (i >= cdf_.size() - 1) i = cdf_.size() - 2;
  const double s = pos - static_cast<double>(i);
  // Cubic Hermite with the density as the derivative of the CDF.
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * cdf_[i] + h10 * step_ * density_[i] + h01 * cdf_[i + 1] + h11 * step_ * density_[i + 1];
}

double RatioCdfTable::cdf(double w) const {
  if (!(w > 0.0)) return 0.0;
  if (std::isinf(w)) return 1.0;
  return std::clamp(cdf_log(std::log(w)), 0.0, 1.0);
}

double RatioLaw::cdf(double w) const {
  if (!inverted_) return table_->cdf(w);
  if (!(w > 0.0)) return 0.0;
  return std::clamp(1.0 - table_->cdf(1.0 / w), 0.0, 1.0);
}

namespace {

using LawKey = std::tuple<double, double, double>;
using TableKey = std::tuple<LawKey, LawKey, double, double, int>;

struct TableCache {
  std::mutex mutex;
  std::map<TableKey, std::shared_ptr<const RatioCdfTable>> tables;
};

TableCache& table_cache() {
  static TableCache cache;
  return cache;
}

}  // namespace

RatioLaw ratio_law(const NetworkModel& model, std::size_t k, std::size_t j, const QuadSettings& q) {
  check_pair(model, k, j);
  const auto key_k = tier_law(model, k).key();
  const auto key_j = tier_law(model, j).key();
  const bool inverted = key_j < key_k;
  const std::size_t first = inverted ? j : k;
  const std::size_t second = inverted ? k : j;
  const TableKey key{inverted ? key_j : key_k, inverted ? key_k : key_j, q.rel_tol, q.abs_tol,
                     q.max_subdivisions};
  auto& cache = table_cache();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.tables.find(key); it != cache.tables.end()) return RatioLaw(it->second, inverted);
  }
  // Built outside the lock; a concurrent duplicate build yields the same table.
  auto table = std::make_shared<const RatioCdfTable>(model, first, second, q);
  std::lock_guard lock(cache.mutex);
  auto [it, inserted] = cache.tables.emplace(key, std::move(table));
  return RatioLaw(it->second, inverted);
}

double pairwise_preference(const RatioLaw& law, double bandwidth_ratio, const LoadDistribution& load_k,
                           const LoadDistribution& load_j) {
  const auto pk = load_k.pmf_table();
  const auto pj = load_j.pmf_table();
  double sum = 0.0;
  for (std::size_t t = 0; t < pj.size(); ++t) {
    const double scale = 1.0 / (bandwidth_ratio * static_cast<double>(t + 1));
    double inner = 0.0;
    for (std::size_t n = 0; n < pk.size(); ++n) {
      inner += pk[n] * (1.0 - law.cdf(static_cast<double>(n + 1) * scale));
    }
    sum += pj[t] * inner;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double pairwise_preference(const NetworkModel& model, std::size_t k, std::size_t j,
                           std::span<const double> t, const QuadSettings& q) {
  check_pair(model, k, j);
  if (t.size() != model.tier_count()) throw std::invalid_argument("pairwise_preference: wrong T length");
  const LoadDistribution nk(model, k, t[k], q.series_tail_tol);
  const LoadDistribution nj(model, j, t[j], q.series_tail_tol);
  return pairwise_preference(ratio_law(model, k, j, q),
                             model.tiers[k].bandwidth / model.tiers[j].bandwidth, nk, nj);
}

// ---------------------------------------------------------------------------
// Fixed point

namespace {

class AssociationMap {
 public:
  AssociationMap(const NetworkModel& model, const QuadSettings& q) : model_(model), q_(q) {
    const std::size_t K = model.tier_count();
    laws_.reserve(K * K);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < K; ++j) {
        laws_.push_back(k == j ? std::nullopt : std::optional<RatioLaw>(ratio_law(model, k, j, q)));
      }
    }
  }

  std::vector<double> operator()(std::span<const double> t) const {
    const std::size_t K = model_.tier_count();
    std::vector<LoadDistribution> loads;
    loads.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
      loads.emplace_back(model_, k, std::clamp(t[k], 0.0, 1.0), q_.series_tail_tol);
    }
    std::vector<double> g(K, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < K; ++j) {
        if (j == k) continue;
        g[k] *= pairwise_preference(*laws_[k * K + j],
                                    model_.tiers[k].bandwidth / model_.tiers[j].bandwidth, loads[k],
                                    loads[j]);
      }
    }
    return g;
  }

 private:
  const NetworkModel& model_;
  QuadSettings q_;
  std::vector<std::optional<RatioLaw>> laws_;
};

}  // namespace

std::vector<double> association_map(const NetworkModel& model, std::span<const double> t,
                                    const QuadSettings& q) {
  if (t.size() != model.tier_count()) throw std::invalid_argument("association_map: wrong T length");
  return AssociationMap(model, q)(t);
}

TierProbabilities solve_tier_probabilities(const ValidatedModel& vm, const QuadSettings& q,
                                           const FixedPointOptions& opt) {
  const NetworkModel& model = vm;
  const std::size_t K = model.tier_count();
  if (!q.valid()) throw std::invalid_argument("invalid quadrature settings");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  TierProbabilities out;
  if (K == 1) {
    out.t = {1.0};
    out.raw = {1.0};
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  const AssociationMap map(model, q);
  std::vector<double> t = opt.initial.empty() ? std::vector<double>(K, 1.0 / static_cast<double>(K))
                                              : opt.initial;
  if (t.size() != K) throw std::invalid_argument("initial T has the wrong length");

  for (int it = 1; it <= opt.max_iter; ++it) {
    auto g = map(t);
    if (opt.normalize) {
      double total = 0.0;
      for (double v : g) total += v;
      if (!(total > 0.0)) throw std::runtime_error("association map vanished");
      for (double& v : g) v /= total;
    }
    double residual = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double next = (1.0 - opt.damping) * t[k] + opt.damping * g[k];
      residual = std::max(residual, std::abs(next - t[k]));
      t[k] = next;
    }
    out.iterations = it;
    out.residual = residual;
    if (residual <= opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.raw = map(t);
  double raw_total = 0.0;
  for (double v : out.raw) raw_total += v;
  out.sum_deviation = std::abs(raw_total - 1.0);
  out.t = std::move(t);
  return out;
}

// ---------------------------------------------------------------------------
// Rates

double spectral_efficiency(const NetworkModel& model, std::size_t k, const QuadSettings& q) {
  const TierLaw law = tier_law(model, k);
  const QuadSettings inner = inner_settings(q);
  auto f = [&](double t) { return t > kMaxLogArgument ? 0.0 : coverage(law, std::expm1(t), inner); };
  return integrate(f, geometric_breakpoints(1.0), q).value;
}

double ergodic_rate_conditional(const NetworkModel& model, std::size_t k, const QuadSettings& q) {
  check_tier(model, k);
  return model.tiers[k].bandwidth * spectral_efficiency(model, k, q);
}

double equal_share_factor(const NetworkModel& model, std::size_t k, double t_k, const QuadSettings& q) {
  const LoadDistribution load(model, k, t_k, q.series_tail_tol);
  double sum = 0.0;
  const auto pmf = load.pmf_table();
  for (std::size_t n = 0; n < pmf.size(); ++n) sum += pmf[n] / static_cast<double>(n + 1);
  return sum;
}

RateReport average_ergodic_rate(const ValidatedModel& vm, const QuadSettings& q, RateMetric metric,
                                const FixedPointOptions& opt) {
  const NetworkModel& model = vm;
  RateReport report;
  report.metric = metric;
  report.tier_probs = solve_tier_probabilities(vm, q, opt);
  const std::size_t K = model.tier_count();
  report.per_tier_rate.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    double r = ergodic_rate_conditional(model, k, q);
    if (metric == RateMetric::EqualShare) r *= equal_share_factor(model, k, report.tier_probs.t[k], q);
    report.per_tier_rate[k] = r;
    report.average_rate += report.tier_probs.t[k] * r;
  }
  return report;
}

}  // namespace hetnet
