#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hetnet {

struct QuadSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  // Truncation threshold for the negative-binomial series.
  double series_tail_tol = 1e-10;

  [[nodiscard]] bool valid() const {
    return rel_tol > 0.0 && abs_tol > 0.0 && series_tail_tol > 0.0 && max_subdivisions >= 10;
  }
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

namespace detail {

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  std::size_t segment = 0;
};

// One 21-point Kronrod / 10-point Gauss panel with QUADPACK error scaling.
template <class G>
Panel gauss_kronrod_panel(const G& g, double a, double b, std::size_t segment) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  static const auto& nodes = GK::abscissa();
  static const auto& kw = GK::weights();
  // Gauss-10 weights for the odd Kronrod nodes 1,3,...,9.
  static constexpr double gw[5] = {0.29552422471475287, 0.26926671930999635,
                                   0.21908636251598204, 0.14945134915058059,
                                   0.066671344308688138};
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[21];
  fv[0] = g(center);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    fv[2 * i - 1] = g(center - dx);
    fv[2 * i] = g(center + dx);
  }
  for (double v : fv) {
    if (!std::isfinite(v)) {
      throw QuadratureFailure("non-finite integrand on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
  }

  double kronrod = kw[0] * fv[0];
  double gauss = 0.0;
  double resabs = kw[0] * std::abs(fv[0]);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kronrod += kw[i] * pair;
    resabs += kw[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
    if (i % 2 == 1) gauss += gw[i / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kw[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    resasc += kw[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }

  Panel p{a, b, kronrod * half, std::abs((kronrod - gauss) * half), segment};
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  if (resasc != 0.0 && p.error != 0.0) {
    p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    p.error = std::max(50.0 * eps * resabs, p.error);
  }
  return p;
}

inline bool by_error(const Panel& l, const Panel& r) { return l.error < r.error; }

}  // namespace detail

// Global adaptive Gauss-Kronrod over the segments between consecutive
// breakpoints. The last breakpoint may be +infinity; that segment is mapped
// onto [0, 1) by x = a + s / (1 - s). The panel with the largest error is
// bisected until the summed error meets max(abs_tol, rel_tol * |I|).
// Throws QuadratureFailure if that needs more than max_subdivisions panels.
template <class F>
QuadResult integrate(const F& f, std::span<const double> breakpoints, const QuadSettings& q) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  const std::size_t nseg = breakpoints.size() - 1;
  const bool tail = std::isinf(breakpoints.back());

  auto eval_segment = [&](std::size_t seg, double a, double b) {
    if (tail && seg == nseg - 1) {
      const double origin = breakpoints[seg];
      auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double x = origin + s / one_minus;
        return f(x) / (one_minus * one_minus);
      };
      return detail::gauss_kronrod_panel(mapped, a, b, seg);
    }
    return detail::gauss_kronrod_panel(f, a, b, seg);
  };

  std::vector<detail::Panel> heap;
  heap.reserve(static_cast<std::size_t>(q.max_subdivisions) + nseg);
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t s = 0; s < nseg; ++s) {
    double a = breakpoints[s];
    double b = breakpoints[s + 1];
    if (tail && s == nseg - 1) {
      a = 0.0;
      b = 1.0;
    }
    if (!(b > a)) continue;
    heap.push_back(eval_segment(s, a, b));
    total += heap.back().value;
    total_err += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end(), detail::by_error);

  double frozen_value = 0.0;
  double frozen_error = 0.0;
  int subdivisions = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(total));
    if (total_err <= tol) break;
    if (subdivisions >= q.max_subdivisions) {
      throw QuadratureFailure("integrate: tolerance " + std::to_string(tol) +
                              " not reached within " + std::to_string(q.max_subdivisions) +
                              " subdivisions (error estimate " + std::to_string(total_err) + ")");
    }
    std::pop_heap(heap.begin(), heap.end(), detail::by_error);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    // Panels at the resolution limit of double precision cannot be refined.
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 1e3 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      continue;
    }
    const auto left = eval_segment(worst.segment, worst.a, mid);
    const auto right = eval_segment(worst.segment, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), detail::by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), detail::by_error);
    ++subdivisions;
  }

  // Re-sum from the panels so the result does not carry the running-sum drift.
  double value = frozen_value;
  double error = frozen_error;
  for (const auto& p : heap) {
    value += p.value;
    error += p.error;
  }
  const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(value));
  if (error > tol && frozen_error > 0.5 * tol) {
    throw QuadratureFailure("integrate: round-off limits accuracy (error estimate " +
                            std::to_string(error) + ")");
  }
  return QuadResult{value, error, subdivisions};
}

template <class F>
QuadResult integrate(const F& f, std::initializer_list<double> breakpoints, const QuadSettings& q) {
  return integrate(f, std::span<const double>(breakpoints.begin(), breakpoints.size()), q);
}

template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadSettings& q) {
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts, 2), q);
}

// Breakpoints 0, s, 4s, 16s, ... , 4^n s, +inf for integrands that decay on
// the length scale s.
std::vector<double> geometric_breakpoints(double scale, int count = 4);

}  // namespace hetnet
