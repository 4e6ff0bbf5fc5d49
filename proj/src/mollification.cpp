#include "kirchhoff/mollification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

double bump(double sigma) {
    double q = 1.0 - sigma * sigma;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

}  // namespace

Mollifier::Mollifier() {
    boost::math::quadrature::tanh_sinh<double> integrator;
    double mass = integrator.integrate(bump, -1.0, 1.0, 1e-14);
    z_ = 1.0 / mass;

    using Rule = boost::math::quadrature::gauss<double, nodes>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // x holds the nonnegative half of a symmetric rule with an even node count
    std::size_t half = nodes / 2;
    for (std::size_t i = 0; i < half; ++i) {
        abscissa_[half - 1 - i] = -x[i];
        abscissa_[half + i] = x[i];
        weight_[half - 1 - i] = weight_[half + i] = w[i] * bump(x[i]);
    }
    double total = 0.0;
    for (double v : weight_) total += v;
    for (double& v : weight_) v /= total;
}

const Mollifier& Mollifier::standard() {
    static const Mollifier instance;
    return instance;
}

double Mollifier::profile(double sigma) const { return z_ * bump(sigma); }

Coefficient extend_coefficient(const Nonlinearity& m, double s_offset, double s1, int orientation) {
    if (!(s1 > 0.0)) throw ParameterError("extension interval s1 must be positive");
    if (!(s_offset >= 0.0)) throw ParameterError("offset |A^{1/2}u0|^2 must be nonnegative");
    if (orientation != 1 && orientation != -1) throw ParameterError("orientation must be +1 or -1");
    double sign = orientation;
    return [m, s_offset, s1, sign](double s) {
        double clamped = std::clamp(s, 0.0, s1);
        return m(std::max(0.0, s_offset + sign * clamped));
    };
}

MollifiedCoefficient::MollifiedCoefficient(Coefficient base, double epsilon, Hyperbolicity mode,
                                           std::optional<ContinuityModulus> omega)
    : base_(std::move(base)), epsilon_(epsilon), mode_(mode), omega_(std::move(omega)) {
    if (!(epsilon > 0.0)) throw ParameterError("mollification needs epsilon > 0");
    if (!base_) throw ParameterError("mollification needs a coefficient");
    if (mode_ == Hyperbolicity::weak) {
        if (!omega_) throw ParameterError("weak-mode mollification needs a continuity modulus");
        lift_ = (*omega_)(epsilon_);
    }
}

double MollifiedCoefficient::convolution(double s) const {
    double eps = epsilon_;
    const auto& c = base_;
    return Mollifier::standard().average([&](double sigma) { return c(s + eps * sigma); });
}

double MollifiedCoefficient::derivative(double s) const {
    double h = epsilon_ * 1e-4;
    return (convolution(s + h) - convolution(s - h)) / (2.0 * h);
}

Coefficient MollifiedCoefficient::as_function() const {
    return [self = *this](double s) { return self(s); };
}

MollifiedCoefficient mollify(Coefficient c, const ContinuityModulus& omega, double epsilon, Hyperbolicity mode) {
    return MollifiedCoefficient(std::move(c), epsilon, mode, omega);
}

double epsilon_for_mode(double lambda, const ScalarFunction& omega, Hyperbolicity mode) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("epsilon schedule needs lambda_k > 0");
    if (mode == Hyperbolicity::strict) return 1.0 / lambda;

    const double target = 1.0 / lambda;
    auto h = [&](double eps) { return eps * std::sqrt(omega(eps)); };

    double lo = 1.0, hi = 1.0;
    for (int i = 0; h(lo) >= target; ++i) {
        if (i > 2000) throw ScheduleError("cannot bracket h^{-1}(1/lambda) from below");
        lo *= 0.5;
    }
    for (int i = 0; h(hi) < target; ++i) {
        if (i > 2000) throw ScheduleError("h(eps) = eps sqrt(omega(eps)) does not reach 1/lambda");
        hi *= 2.0;
    }

    // h has to be strictly increasing on the bracket for the inverse to exist
    constexpr int probes = 256;
    double prev = h(lo);
    for (int i = 1; i <= probes; ++i) {
        double e = lo * std::pow(hi / lo, static_cast<double>(i) / probes);
        double v = h(e);
        if (!(v > prev)) throw ScheduleError(fmt::format("h is not strictly increasing near eps={}", e));
        prev = v;
    }

    for (int it = 0; it < 400 && (hi - lo) > 1e-13 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double MollifierEstimateReport::gamma3_spread() const {
    if (sweep.empty()) return 1.0;
    auto [lo, hi] = std::minmax_element(sweep.begin(), sweep.end(),
                                        [](const auto& a, const auto& b) { return a.gamma3 < b.gamma3; });
    return lo->gamma3 > 0.0 ? hi->gamma3 / lo->gamma3 : (hi->gamma3 > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
}

double MollifierEstimateReport::gamma4_spread() const {
    if (sweep.empty()) return 1.0;
    auto [lo, hi] = std::minmax_element(sweep.begin(), sweep.end(),
                                        [](const auto& a, const auto& b) { return a.gamma4 < b.gamma4; });
    return lo->gamma4 > 0.0 ? hi->gamma4 / lo->gamma4 : (hi->gamma4 > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
}

MollifierEstimateReport verify_mollifier_estimates(const Coefficient& c, const ContinuityModulus& omega,
                                                   const std::vector<double>& eps_sweep,
                                                   const std::vector<double>& s_grid, Hyperbolicity mode,
                                                   std::optional<double> s1) {
    if (s_grid.empty()) throw ParameterError("mollifier estimate grid is empty");
    MollifierEstimateReport report;
    report.mode = mode;
    report.s1 = s1;
    report.c_min = std::numeric_limits<double>::infinity();
    report.c_max = -std::numeric_limits<double>::infinity();

    std::vector<double> c_values(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        double v = c(s_grid[i]);
        if (std::isnan(v)) throw ModelError(fmt::format("coefficient is NaN at s={}", s_grid[i]));
        c_values[i] = v;
        report.c_min = std::min(report.c_min, v);
        report.c_max = std::max(report.c_max, v);
    }

    report.c_eps_min = std::numeric_limits<double>::infinity();
    report.c_eps_max = -std::numeric_limits<double>::infinity();
    for (double eps : eps_sweep) {
        if (!(eps > 0.0)) throw ParameterError("epsilon sweep must be positive");
        MollifiedCoefficient ce(c, eps, mode, omega);
        double w = omega(eps);
        MollifierSweepEntry e;
        e.epsilon = eps;
        e.c_eps_min = std::numeric_limits<double>::infinity();
        e.c_eps_max = -std::numeric_limits<double>::infinity();
        double dev = 0.0, slope = 0.0;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            double v = ce(s_grid[i]);
            double d = ce.derivative(s_grid[i]);
            if (std::isnan(v) || std::isnan(d)) throw ModelError("mollified coefficient evaluated to NaN");
            dev = std::max(dev, std::abs(v - c_values[i]));
            slope = std::max(slope, std::abs(d));
            e.c_eps_min = std::min(e.c_eps_min, v);
            e.c_eps_max = std::max(e.c_eps_max, v);
        }
        e.gamma3 = dev / w;
        e.gamma4 = slope * eps / w;
        report.gamma3 = std::max(report.gamma3, e.gamma3);
        report.gamma4 = std::max(report.gamma4, e.gamma4);
        report.c_eps_min = std::min(report.c_eps_min, e.c_eps_min);
        report.c_eps_max = std::max(report.c_eps_max, e.c_eps_max);
        report.sweep.push_back(e);
    }
    return report;
}

}  // namespace kirchhoff
