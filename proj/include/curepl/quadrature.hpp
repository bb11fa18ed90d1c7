#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace curepl {

/// `points` equispaced nodes from lo to hi inclusive.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo + step * static_cast<double>(k);
  g.back() = hi;
  return g;
}

/// Trapezoidal rule for samples on a uniform grid with spacing `step`.
inline double trapezoid(std::span<const double> f, double step) {
  if (f.size() < 2) return 0.0;
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) acc += f[k];
  return acc * step;
}

}  // namespace curepl
