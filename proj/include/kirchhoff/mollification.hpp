#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kirchhoff/modulus.hpp"

namespace kirchhoff {

/// Real-valued coefficient evaluator on the whole real line.
using Coefficient = ScalarFunction;

/// Standard bump rho(sigma) = Z exp(-1/(1 - sigma^2)) on |sigma| < 1, unit integral.
///
/// Convolutions use a fixed 64-node Gauss-Legendre rule on [-1, 1]. The
/// discrete weights w_i rho(sigma_i) are renormalized to sum to one so that
/// constants are reproduced exactly and the averaging stays a convex
/// combination (which gives the inf/sup bounds of the strict mode).
class Mollifier {
public:
    static constexpr std::size_t nodes = 64;

    static const Mollifier& standard();

    double normalization() const noexcept { return z_; }
    double profile(double sigma) const;

    /// sum_i W_i f(sigma_i), the discrete version of int f(sigma) rho(sigma) d sigma
    template <class F>
    double average(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) acc += weight_[i] * f(abscissa_[i]);
        return acc;
    }

    const std::array<double, nodes>& abscissae() const noexcept { return abscissa_; }
    const std::array<double, nodes>& weights() const noexcept { return weight_; }

private:
    Mollifier();

    double z_;
    std::array<double, nodes> abscissa_{};
    std::array<double, nodes> weight_{};
};

/// c(s) = m(s_offset + orientation * clamp(s, 0, s1)): constant outside [0, s1].
Coefficient extend_coefficient(const Nonlinearity& m, double s_offset, double s1, int orientation = 1);

/// Strict:  c_eps(s) = int c(s + eps sigma) rho(sigma) d sigma.
/// Weak:    c_eps(s) = omega(eps) + the same convolution.
class MollifiedCoefficient {
public:
    MollifiedCoefficient(Coefficient base, double epsilon, Hyperbolicity mode,
                         std::optional<ContinuityModulus> omega = std::nullopt);

    double operator()(double s) const { return lift_ + convolution(s); }

    /// The convolution part alone; identical in both modes.
    double convolution(double s) const;

    /// Central difference with step eps * 1e-4.
    double derivative(double s) const;

    double base(double s) const { return base_(s); }
    double epsilon() const noexcept { return epsilon_; }
    double lift() const noexcept { return lift_; }
    Hyperbolicity mode() const noexcept { return mode_; }
    const std::optional<ContinuityModulus>& omega() const noexcept { return omega_; }

    Coefficient as_function() const;

private:
    Coefficient base_;
    double epsilon_;
    Hyperbolicity mode_;
    std::optional<ContinuityModulus> omega_;
    double lift_ = 0.0;
};

MollifiedCoefficient mollify(Coefficient c, const ContinuityModulus& omega, double epsilon, Hyperbolicity mode);

/// Per-mode smoothing scale. Strict: 1/lambda. Weak: the eps with eps sqrt(omega(eps)) = 1/lambda,
/// found by bisection to 1e-12 relative.
double epsilon_for_mode(double lambda, const ScalarFunction& omega, Hyperbolicity mode);

struct MollifierSweepEntry {
    double epsilon = 0.0;
    double gamma3 = 0.0;  ///< sup_s |c_eps - c| / omega(eps)
    double gamma4 = 0.0;  ///< sup_s |c_eps'| eps / omega(eps)
    double c_eps_min = 0.0;
    double c_eps_max = 0.0;
};

struct MollifierEstimateReport {
    Hyperbolicity mode = Hyperbolicity::strict;
    double gamma3 = 0.0;
    double gamma4 = 0.0;
    double c_eps_min = 0.0;  ///< lower bound of c_eps over sweep x grid (gamma2-style)
    double c_eps_max = 0.0;  ///< upper bound (gamma5 / gamma24-style)
    double c_min = 0.0;      ///< inf of c on the grid
    double c_max = 0.0;      ///< sup of c on the grid
    std::optional<double> s1;
    std::vector<MollifierSweepEntry> sweep;

    /// max/min of the per-epsilon constants across the sweep
    double gamma3_spread() const;
    double gamma4_spread() const;
};

MollifierEstimateReport verify_mollifier_estimates(const Coefficient& c, const ContinuityModulus& omega,
                                                   const std::vector<double>& eps_sweep,
                                                   const std::vector<double>& s_grid,
                                                   Hyperbolicity mode = Hyperbolicity::strict,
                                                   std::optional<double> s1 = std::nullopt);

}  // namespace kirchhoff
