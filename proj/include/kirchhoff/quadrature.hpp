#pragma once

#include <span>
#include <vector>

namespace kirchhoff::quadrature {

/// Running trapezoid integral; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// Running integral of g(s)/sqrt(s) from 0, with g linear on each cell and
/// integrated exactly against s^{-1/2}. Requires x[0] >= 0 and increasing x.
std::vector<double> cumulative_inverse_sqrt(std::span<const double> x, std::span<const double> g);

/// Geometric grid lo..hi (inclusive) with `per_decade` points per factor of ten.
std::vector<double> geometric_grid(double lo, double hi, int per_decade);

/// {base^e : e = from..to}
std::vector<double> power_grid(double base, int from, int to);

}  // namespace kirchhoff::quadrature
