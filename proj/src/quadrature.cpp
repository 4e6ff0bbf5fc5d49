#include "kirchhoff/quadrature.hpp"

#include <cmath>

#include "kirchhoff/errors.hpp"

namespace kirchhoff::quadrature {

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("cumulative_trapezoid: size mismatch");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

std::vector<double> cumulative_inverse_sqrt(std::span<const double> x, std::span<const double> g) {
    if (x.size() != g.size()) throw DimensionError("cumulative_inverse_sqrt: size mismatch");
    std::vector<double> out(x.size(), 0.0);
    if (x.empty()) return out;
    if (x[0] < 0.0) throw ParameterError("cumulative_inverse_sqrt needs a nonnegative grid");
    for (std::size_t i = 1; i < x.size(); ++i) {
        double a = x[i - 1], b = x[i];
        double slope = (g[i] - g[i - 1]) / (b - a);
        double offset = g[i - 1] - slope * a;
        double ra = std::sqrt(a), rb = std::sqrt(b);
        out[i] = out[i - 1] + 2.0 * offset * (rb - ra) + slope * (2.0 / 3.0) * (b * rb - a * ra);
    }
    return out;
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) throw ParameterError("invalid geometric grid");
    double decades = std::log10(hi / lo);
    auto n = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double frac = (n == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = lo * std::pow(hi / lo, frac);
    }
    out.back() = hi;
    return out;
}

std::vector<double> power_grid(double base, int from, int to) {
    std::vector<double> out;
    for (int e = from; e <= to; ++e) out.push_back(std::pow(base, e));
    return out;
}

}  // namespace kirchhoff::quadrature
