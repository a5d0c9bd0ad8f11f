#include "hetnet/sim.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace hetnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double path_gain(double d2, double alpha) {
  if (alpha == 4.0) return 1.0 / (d2 * d2);
  return std::pow(d2, -0.5 * alpha);
}

// Nearest BS of `bs` seen from p, with its SINR against the rest of the tier.
Candidate nearest_with_sinr(Point p, const std::vector<Point>& bs, const Window& w,
                            std::uint64_t stream, double alpha, double power, double noise) {
  std::size_t best = 0;
  double best_d2 = kInf;
  double best_rx = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const double d2 = w.distance_squared(p, bs[i]);
    if (d2 == 0.0) throw CoincidentPoints();
    const double rx = Fading::gain_at(stream, i) * path_gain(d2, alpha);
    total += rx;
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
      best_rx = rx;
    }
  }
  double interference = total - best_rx;
  // The subtraction keeps at least 13 significant digits; below this ratio
  // the interference is summed again directly.
  if (interference < 1e-3 * total) {
    interference = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
      if (i == best) continue;
      interference += Fading::gain_at(stream, i) * path_gain(w.distance_squared(p, bs[i]), alpha);
    }
  }
  Candidate c;
  c.bs = best;
  c.distance = std::sqrt(best_d2);
  c.sinr = power * best_rx / (power * interference + noise);
  return c;
}

std::vector<Point> sample_uniform(std::size_t count, const Window& window, Rng& rng) {
  std::uniform_real_distribution<double> coord(0.0, window.side());
  std::vector<Point> pts(count);
  for (auto& p : pts) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  return pts;
}

// Resamples until at least one point is drawn.
std::vector<Point> sample_nonempty(double density, const Window& window, Rng& rng,
                                   std::size_t tier, int max_attempts = 10) {
  for (int a = 0; a < max_attempts; ++a) {
    auto pts = sample_ppp(density, window, rng);
    if (!pts.empty()) return pts;
  }
  throw NoBsInTier(tier);
}

std::vector<int> recount(const std::vector<Association>& assoc, std::size_t tier,
                         std::size_t bs_count) {
  std::vector<int> load(bs_count, 0);
  for (const auto& a : assoc) {
    if (a.tier == tier) ++load[a.bs];
  }
  return load;
}

Assignment best_response(const CandidateTable& cand, const Snapshot& snap, const NetworkModel& model,
                         int max_rounds) {
  const std::size_t n = cand.mu_count();
  const std::size_t K = cand.tier_count();
  Assignment a;
  a.assoc.resize(n);
  a.load.resize(K);
  for (std::size_t k = 0; k < K; ++k) a.load[k].assign(snap.bs[k].size(), 0);

  for (std::size_t m = 0; m < n; ++m) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (cand.at(m, k).sinr > cand.at(m, best).sinr) best = k;
    }
    a.assoc[m] = {best, cand.at(m, best).bs};
    ++a.load[best][a.assoc[m].bs];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(snap.seed, 2));
  std::shuffle(order.begin(), order.end(), rng);

  a.converged = false;
  for (int round = 1; round <= max_rounds; ++round) {
    a.rounds = round;
    bool changed = false;
    for (std::size_t m : order) {
      const std::size_t cur = a.assoc[m].tier;
      const double u_cur = proposed_utility(model.tiers[cur].bandwidth,
                                            a.load[cur][a.assoc[m].bs] - 1, cand.at(m, cur).sinr);
      std::size_t best = cur;
      double u_best = -kInf;
      for (std::size_t k = 0; k < K; ++k) {
        if (k == cur) continue;
        const auto& c = cand.at(m, k);
        const double u = proposed_utility(model.tiers[k].bandwidth, a.load[k][c.bs], c.sinr);
        if (u > u_best) {
          u_best = u;
          best = k;
        }
      }
      // A switch strictly increases the MU's utility; equal utility stays put.
      if (best != cur && u_best > u_cur) {
        --a.load[cur][a.assoc[m].bs];
        a.assoc[m] = {best, cand.at(m, best).bs};
        ++a.load[best][a.assoc[m].bs];
        ++a.switches;
        changed = true;
      }
    }
    if (!changed) {
      a.converged = true;
      break;
    }
  }
  return a;
}

struct SchemeOutcome {
  std::vector<double> share;
  double rate_full = 0.0;
  double rate_equal = 0.0;
  std::vector<double> tier_rate_full;   // conditional means; NaN-free, 0 if tier empty
  std::vector<double> tier_rate_equal;
  std::vector<std::size_t> tier_mus;
  std::vector<std::vector<std::uint64_t>> hist;
  std::vector<double> preference;  // K*K counts
  bool converged = true;
  int rounds = 0;
  std::size_t mus = 0;
};

struct ReplicationOutcome {
  std::vector<SchemeOutcome> schemes;
};

SchemeOutcome summarize(const Assignment& a, const CandidateTable& cand, const NetworkModel& model) {
  const std::size_t K = cand.tier_count();
  const std::size_t n = cand.mu_count();
  SchemeOutcome out;
  out.mus = n;
  out.share.assign(K, 0.0);
  out.tier_rate_full.assign(K, 0.0);
  out.tier_rate_equal.assign(K, 0.0);
  out.tier_mus.assign(K, 0);
  out.preference.assign(K * K, 0.0);
  out.hist.resize(K);
  out.converged = a.converged;
  out.rounds = a.rounds;

  std::vector<double> full(n);
  std::vector<double> equal(n);
  std::vector<std::vector<double>> by_tier_full(K);
  std::vector<std::vector<double>> by_tier_equal(K);
  std::vector<double> u(K);
  for (std::size_t m = 0; m < n; ++m) {
    const auto [tier, bs] = a.assoc[m];
    const double b = model.tiers[tier].bandwidth;
    const double se = std::log1p(cand.at(m, tier).sinr);
    full[m] = b * se;
    equal[m] = b / static_cast<double>(a.load[tier][bs]) * se;
    by_tier_full[tier].push_back(full[m]);
    by_tier_equal[tier].push_back(equal[m]);
    ++out.tier_mus[tier];
    for (std::size_t k = 0; k < K; ++k) {
      const auto& c = cand.at(m, k);
      const int others = a.load[k][c.bs] - (k == tier ? 1 : 0);
      u[k] = proposed_utility(model.tiers[k].bandwidth, others, c.sinr);
    }
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < K; ++j) {
        if (k != j && u[k] > u[j]) out.preference[k * K + j] += 1.0;
      }
    }
  }
  if (n > 0) {
    out.rate_full = pairwise_sum(full) / static_cast<double>(n);
    out.rate_equal = pairwise_sum(equal) / static_cast<double>(n);
    for (std::size_t k = 0; k < K; ++k) {
      out.share[k] = static_cast<double>(out.tier_mus[k]) / static_cast<double>(n);
      if (out.tier_mus[k] > 0) {
        out.tier_rate_full[k] = pairwise_sum(by_tier_full[k]) / static_cast<double>(out.tier_mus[k]);
        out.tier_rate_equal[k] = pairwise_sum(by_tier_equal[k]) / static_cast<double>(out.tier_mus[k]);
      }
    }
    for (auto& p : out.preference) p /= static_cast<double>(n);
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (int load : a.load[k]) {
      const auto l = static_cast<std::size_t>(load);
      if (out.hist[k].size() <= l) out.hist[k].resize(l + 1, 0);
      ++out.hist[k][l];
    }
  }
  return out;
}

MetricsTable aggregate(const AssociationScheme& scheme, std::size_t s,
                       const std::vector<ReplicationOutcome>& reps, std::size_t K, double side) {
  MetricsTable t;
  t.scheme = scheme;
  t.window_side = side;
  t.tier_share.resize(K);
  t.tier_rate_full_band.resize(K);
  t.tier_rate_equal_share.resize(K);
  t.load_histogram.resize(K);
  t.preference.assign(K, std::vector<double>(K, 0.0));

  std::vector<double> rounds;
  std::vector<double> converged;
  std::vector<std::vector<double>> share(K), rate_f(K), rate_e(K);
  std::vector<std::vector<double>> pref(K * K);
  for (const auto& rep : reps) {
    const auto& o = rep.schemes[s];
    if (o.mus == 0) continue;
    ++t.replications;
    t.mu_samples += o.mus;
    t.replication_rate_full_band.push_back(o.rate_full);
    t.replication_rate_equal_share.push_back(o.rate_equal);
    rounds.push_back(static_cast<double>(o.rounds));
    converged.push_back(o.converged ? 1.0 : 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      share[k].push_back(o.share[k]);
      if (o.tier_mus[k] > 0) {
        rate_f[k].push_back(o.tier_rate_full[k]);
        rate_e[k].push_back(o.tier_rate_equal[k]);
      }
      auto& h = t.load_histogram[k];
      if (h.size() < o.hist[k].size()) h.resize(o.hist[k].size(), 0);
      for (std::size_t l = 0; l < o.hist[k].size(); ++l) h[l] += o.hist[k][l];
    }
    for (std::size_t i = 0; i < K * K; ++i) pref[i].push_back(o.preference[i]);
  }
  t.rate_full_band = mean_se(t.replication_rate_full_band);
  t.rate_equal_share = mean_se(t.replication_rate_equal_share);
  t.convergence_fraction = converged.empty() ? 1.0 : mean_se(converged).mean;
  t.mean_rounds = mean_se(rounds).mean;
  for (std::size_t k = 0; k < K; ++k) {
    t.tier_share[k] = mean_se(share[k]);
    t.tier_rate_full_band[k] = mean_se(rate_f[k]);
    t.tier_rate_equal_share[k] = mean_se(rate_e[k]);
    for (std::size_t j = 0; j < K; ++j) t.preference[k][j] = mean_se(pref[k * K + j]).mean;
  }
  return t;
}

}  // namespace

Window::Window(double side) : side_(side) {
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw std::invalid_argument("window side must be positive and finite");
  }
}

Window Window::auto_sized(const NetworkModel& model, double min_expected) {
  double sparsest = kInf;
  for (const auto& t : model.tiers) sparsest = std::min(sparsest, t.density);
  if (!(sparsest > 0.0) || !std::isfinite(sparsest)) {
    throw std::invalid_argument("auto-sizing needs positive tier densities");
  }
  return for_count(sparsest, min_expected);
}

Window Window::for_count(double density, double expected) {
  return Window(std::sqrt(expected / density));
}

double Window::distance_squared(Point a, Point b) const {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  if (dx > 0.5 * side_) dx = side_ - dx;
  if (dy > 0.5 * side_) dy = side_ - dy;
  return dx * dx + dy * dy;
}

std::vector<Point> sample_ppp(double density, const Window& window, Rng& rng) {
  const double mean = density * window.area();
  if (!(mean > 0.0)) return {};
  std::poisson_distribution<long long> count(mean);
  return sample_uniform(static_cast<std::size_t>(count(rng)), window, rng);
}

Snapshot sample_snapshot(const NetworkModel& model, const Window& window, std::uint64_t seed,
                         int max_attempts) {
  Rng rng(seed);
  Snapshot s;
  s.seed = seed;
  s.window = window;
  std::size_t empty_tier = 0;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    s.bs.clear();
    bool ok = true;
    for (std::size_t k = 0; k < model.tier_count(); ++k) {
      s.bs.push_back(sample_ppp(model.tiers[k].density, window, rng));
      if (s.bs.back().empty() && ok) {
        ok = false;
        empty_tier = k;
      }
    }
    s.mu = sample_ppp(model.mu_density, window, rng);
    if (ok) return s;
  }
  throw NoBsInTier(empty_tier);
}

std::uint64_t Fading::stream(std::size_t mu, std::size_t tier) const {
  const std::uint64_t h = splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(mu)));
  return splitmix64(h ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(tier) + 1)));
}

double Fading::gain_at(std::uint64_t stream, std::size_t bs) {
  return -std::log1p(-unit_interval(splitmix64(stream ^ static_cast<std::uint64_t>(bs))));
}

double sinr(std::size_t mu, std::size_t tier, std::size_t bs, const Snapshot& snapshot,
            const Fading& fading, const NetworkModel& model) {
  const auto& pts = snapshot.bs.at(tier);
  const Point p = snapshot.mu.at(mu);
  const std::uint64_t stream = fading.stream(mu, tier);
  const double alpha = model.alpha;
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = snapshot.window.distance_squared(p, pts[i]);
    if (d2 == 0.0) throw CoincidentPoints();
    const double rx = Fading::gain_at(stream, i) * path_gain(d2, alpha);
    if (i == bs) {
      signal = rx;
    } else {
      interference += rx;
    }
  }
  const double power = model.tiers[tier].tx_power;
  return power * signal / (power * interference + model.noise_power);
}

CandidateTable build_candidates(const Snapshot& snapshot, const Fading& fading,
                                const NetworkModel& model) {
  const std::size_t K = model.tier_count();
  CandidateTable table(snapshot.mu.size(), K);
  for (std::size_t k = 0; k < K; ++k) {
    if (snapshot.bs[k].empty()) throw NoBsInTier(k);
  }
  for (std::size_t m = 0; m < snapshot.mu.size(); ++m) {
    for (std::size_t k = 0; k < K; ++k) {
      table.at(m, k) = nearest_with_sinr(snapshot.mu[m], snapshot.bs[k], snapshot.window,
                                         fading.stream(m, k), model.alpha,
                                         model.tiers[k].tx_power, model.noise_power);
    }
  }
  return table;
}

Assignment associate(const CandidateTable& cand, const Snapshot& snapshot, const Fading& fading,
                     const NetworkModel& model, const AssociationScheme& scheme,
                     const AssociationOptions& opt) {
  const std::size_t K = model.tier_count();
  const std::size_t n = cand.mu_count();
  for (std::size_t k = 0; k < K; ++k) {
    if (snapshot.bs[k].empty()) throw NoBsInTier(k);
  }

  Assignment a;
  if (scheme.variant == Scheme::Proposed) {
    a = best_response(cand, snapshot, model, opt.max_rounds);
  } else {
    a.assoc.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t best = 0;
      double best_score = -kInf;
      for (std::size_t k = 0; k < K; ++k) {
        const auto& c = cand.at(m, k);
        double score = 0.0;
        switch (scheme.variant) {
          case Scheme::MaxSinr:
            score = c.sinr;
            break;
          case Scheme::Nearest:
            score = -c.distance;
            break;
          case Scheme::Cre:
          case Scheme::MaxRss: {
            const double bias = scheme.variant == Scheme::Cre ? model.tiers[k].cre_bias : 1.0;
            double rss = bias * model.tiers[k].tx_power * path_gain(c.distance * c.distance, model.alpha);
            if (opt.rss_with_fading) rss *= fading.gain(m, k, c.bs);
            score = rss;
            break;
          }
          case Scheme::Proposed:
            break;
        }
        if (score > best_score) {
          best_score = score;
          best = k;
        }
      }
      a.assoc[m] = {best, cand.at(m, best).bs};
    }
    a.load.resize(K);
    for (std::size_t k = 0; k < K; ++k) a.load[k] = recount(a.assoc, k, snapshot.bs[k].size());
  }

  a.per_mu_rate.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto [tier, bs] = a.assoc[m];
    const double full = model.tiers[tier].bandwidth * std::log1p(cand.at(m, tier).sinr);
    a.per_mu_rate[m] = scheme.rate_metric == RateMetric::FullBand
                           ? full
                           : full / static_cast<double>(a.load[tier][bs]);
  }
  return a;
}

Assignment associate(const Snapshot& snapshot, const Fading& fading, const NetworkModel& model,
                     const AssociationScheme& scheme, const AssociationOptions& opt) {
  return associate(build_candidates(snapshot, fading, model), snapshot, fading, model, scheme, opt);
}

std::vector<MetricsTable> estimate_metrics(const ValidatedModel& vm,
                                           std::span<const AssociationScheme> schemes,
                                           const SimSettings& settings) {
  if (settings.replications < 1) throw std::invalid_argument("replications must be >= 1");
  const NetworkModel& model = vm;
  const Window window =
      settings.window_side ? Window(*settings.window_side) : Window::auto_sized(model);
  const std::size_t K = model.tier_count();

  std::vector<ReplicationOutcome> reps(settings.replications);
  parallel_for(settings.replications, settings.jobs, [&](std::size_t r) {
    const std::uint64_t snap_seed = derive_seed(settings.seed, r);
    const Snapshot snap = sample_snapshot(model, window, snap_seed);
    const Fading fading(derive_seed(snap_seed, 1));
    const CandidateTable cand = build_candidates(snap, fading, model);
    auto& out = reps[r];
    out.schemes.reserve(schemes.size());
    for (const auto& scheme : schemes) {
      const Assignment a = associate(cand, snap, fading, model, scheme, settings.association);
      out.schemes.push_back(summarize(a, cand, model));
    }
  });

  std::vector<MetricsTable> tables;
  tables.reserve(schemes.size());
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    tables.push_back(aggregate(schemes[s], s, reps, K, window.side()));
  }
  return tables;
}

MetricsTable estimate_metrics(const ValidatedModel& model, const AssociationScheme& scheme,
                              const SimSettings& settings) {
  return estimate_metrics(model, std::span<const AssociationScheme>(&scheme, 1), settings).front();
}

std::vector<CoverageEstimate> estimate_coverage(const NetworkModel& model, std::size_t k,
                                                std::span<const double> thresholds,
                                                std::size_t snapshots,
                                                std::size_t mus_per_snapshot, std::uint64_t seed,
                                                const Window& window, std::size_t jobs) {
  const auto& tier = model.tiers.at(k);
  std::vector<std::vector<double>> frac(thresholds.size(), std::vector<double>(snapshots, 0.0));
  parallel_for(snapshots, jobs, [&](std::size_t s) {
    const std::uint64_t snap_seed = derive_seed(seed, s);
    Rng rng(snap_seed);
    const auto bs = sample_nonempty(tier.density, window, rng, k);
    const auto mus = sample_uniform(mus_per_snapshot, window, rng);
    const Fading fading(derive_seed(snap_seed, 1));
    std::vector<std::size_t> covered(thresholds.size(), 0);
    for (std::size_t m = 0; m < mus.size(); ++m) {
      const Candidate c = nearest_with_sinr(mus[m], bs, window, fading.stream(m, k), model.alpha,
                                            tier.tx_power, model.noise_power);
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (c.sinr > thresholds[i]) ++covered[i];
      }
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      frac[i][s] = mus.empty() ? 0.0
                               : static_cast<double>(covered[i]) / static_cast<double>(mus.size());
    }
  });
  std::vector<CoverageEstimate> out;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out.push_back({thresholds[i], mean_se(frac[i]), snapshots * mus_per_snapshot});
  }
  return out;
}

NearestIndex::NearestIndex(std::span<const Point> points, const Window& window)
    : points_(points), window_(window) {
  if (points.empty()) throw std::invalid_argument("NearestIndex needs at least one point");
  const auto per_side = static_cast<std::size_t>(std::sqrt(static_cast<double>(points.size())));
  grid_ = std::clamp<std::size_t>(per_side, 1, 2048);
  cell_ = window.side() / static_cast<double>(grid_);
  const std::size_t buckets = grid_ * grid_;
  std::vector<std::size_t> bucket_of(points.size());
  start_.assign(buckets + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto bx = std::min(grid_ - 1, static_cast<std::size_t>(points[i].x / cell_));
    const auto by = std::min(grid_ - 1, static_cast<std::size_t>(points[i].y / cell_));
    bucket_of[i] = by * grid_ + bx;
    ++start_[bucket_of[i] + 1];
  }
  std::partial_sum(start_.begin(), start_.end(), start_.begin());
  items_.resize(points.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) items_[fill[bucket_of[i]]++] = i;
}

std::pair<std::size_t, double> NearestIndex::nearest(Point p) const {
  const auto g = static_cast<long>(grid_);
  const long bx = std::min(g - 1, static_cast<long>(p.x / cell_));
  const long by = std::min(g - 1, static_cast<long>(p.y / cell_));
  std::size_t best = 0;
  double best_d2 = kInf;
  auto scan = [&](long cx, long cy) {
    const auto wx = static_cast<std::size_t>(((cx % g) + g) % g);
    const auto wy = static_cast<std::size_t>(((cy % g) + g) % g);
    const std::size_t b = wy * grid_ + wx;
    for (std::size_t it = start_[b]; it < start_[b + 1]; ++it) {
      const std::size_t i = items_[it];
      const double d2 = window_.distance_squared(p, points_[i]);
      if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
        best_d2 = d2;
        best = i;
      }
    }
  };
  for (long r = 0;; ++r) {
    if (r == 0) {
      scan(bx, by);
    } else {
      for (long d = -r; d <= r; ++d) {
        scan(bx + d, by - r);
        scan(bx + d, by + r);
      }
      for (long d = -r + 1; d <= r - 1; ++d) {
        scan(bx - r, by + d);
        scan(bx + r, by + d);
      }
    }
    // Every unvisited bucket is at least r cells away from p.
    const double reach = static_cast<double>(r) * cell_;
    if (best_d2 <= reach * reach || 2 * r + 1 >= g) break;
  }
  return {best, best_d2};
}

CellAreaSample estimate_cell_area_distribution(const NetworkModel& model, std::size_t k,
                                               std::size_t replications, double probes_per_km2,
                                               std::uint64_t seed, const Window& window,
                                               std::size_t jobs) {
  const auto& tier = model.tiers.at(k);
  const double probes_per_m2 = per_km2_to_per_m2(probes_per_km2);
  const auto n = static_cast<std::size_t>(std::ceil(window.side() * std::sqrt(probes_per_m2)));
  const double step = window.side() / static_cast<double>(n);
  std::vector<std::vector<double>> per_rep(replications);
  parallel_for(replications, jobs, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const auto bs = sample_nonempty(tier.density, window, rng, k);
    const NearestIndex index(bs, window);
    std::vector<std::size_t> count(bs.size(), 0);
    for (std::size_t iy = 0; iy < n; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) {
        const Point probe{(static_cast<double>(ix) + 0.5) * step,
                          (static_cast<double>(iy) + 0.5) * step};
        ++count[index.nearest(probe).first];
      }
    }
    // lambda_hat * area = (N / L^2) * (count * L^2 / n^2).
    const double scale = static_cast<double>(bs.size()) / static_cast<double>(n * n);
    auto& out = per_rep[r];
    out.reserve(bs.size());
    for (std::size_t c : count) out.push_back(scale * static_cast<double>(c));
  });
  CellAreaSample sample;
  sample.probes_per_replication = n * n;
  for (const auto& v : per_rep) {
    sample.normalized_area.insert(sample.normalized_area.end(), v.begin(), v.end());
  }
  sample.mean = mean_se(sample.normalized_area).mean;
  sample.variance = sample_variance(sample.normalized_area);
  return sample;
}

LoadHistogram estimate_thinned_load(const NetworkModel& model, std::size_t k, double t_k,
                                    std::size_t replications, std::uint64_t seed,
                                    const Window& window, std::size_t jobs) {
  const auto& tier = model.tiers.at(k);
  std::vector<std::vector<std::size_t>> loads(replications);
  parallel_for(replications, jobs, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const auto bs = sample_nonempty(tier.density, window, rng, k);
    const auto mus = sample_ppp(t_k * model.mu_density, window, rng);
    const NearestIndex index(bs, window);
    auto& count = loads[r];
    count.assign(bs.size(), 0);
    for (const auto& p : mus) ++count[index.nearest(p).first];
  });
  LoadHistogram h;
  std::vector<double> counts;
  double total = 0.0;
  for (const auto& rep : loads) {
    for (std::size_t c : rep) {
      if (counts.size() <= c) counts.resize(c + 1, 0.0);
      counts[c] += 1.0;
      total += static_cast<double>(c);
      ++h.bs_count;
    }
  }
  if (h.bs_count > 0) {
    for (auto& c : counts) c /= static_cast<double>(h.bs_count);
    h.mean = total / static_cast<double>(h.bs_count);
  }
  h.pmf = std::move(counts);
  return h;
}

}  // namespace hetnet
