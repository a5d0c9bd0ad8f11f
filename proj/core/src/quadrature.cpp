#include "hetnet/quadrature.hpp"

namespace hetnet {

std::vector<double> geometric_breakpoints(double scale, int count) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count) + 2);
  pts.push_back(0.0);
  double s = scale;
  for (int i = 0; i < count; ++i, s *= 4.0) pts.push_back(s);
  pts.push_back(std::numeric_limits<double>::infinity());
  return pts;
}

}  // namespace hetnet
