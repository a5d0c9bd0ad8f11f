#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace hetnet {

// Recursive halving summation; the result depends only on the order of the
// input, never on how the caller produced it.
double pairwise_sum(std::span<const double> xs);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean; 0 for n < 2
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

double sample_variance(std::span<const double> xs);

// sup_x |F_n(x) - F(x)| for the empirical CDF of xs against cdf.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf);

// CDF of Gamma(shape, rate).
double gamma_cdf(double x, double shape, double rate);

// (1/2) sum |p_i - q_i|; the shorter vector is padded with zeros.
double total_variation(std::span<const double> p, std::span<const double> q);

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a64(std::string_view bytes);

// Runs body(i) for i in [0, n) on up to `jobs` threads. Indices are claimed
// in increasing order, so after a failure every lower index has run to
// completion and the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace hetnet
