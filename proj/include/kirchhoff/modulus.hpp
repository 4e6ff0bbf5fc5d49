#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kirchhoff/spectral.hpp"

namespace kirchhoff {

using ScalarFunction = std::function<double(double)>;

enum class Hyperbolicity { strict, weak };

std::string to_string(Hyperbolicity mode);

/// Continuity modulus omega: continuous, nondecreasing, subadditive, omega(0) = 0.
class ContinuityModulus {
public:
    enum class Kind { linear, holder, log_lipschitz, bounded_custom };

    /// omega(sigma) = sigma
    static ContinuityModulus linear();
    /// omega(sigma) = sigma^beta, 0 < beta < 1
    static ContinuityModulus holder(double beta);
    /// omega(sigma) = sigma (1 + log(1 + 1/sigma)); behaves like sigma|log sigma| near 0 and is concave.
    static ContinuityModulus log_lipschitz();
    /// Piecewise linear table through (sigma_i, omega_i) with omega(0) = 0, constant past the last
    /// sample and capped at `cap` (default 2*omega(1)).
    static ContinuityModulus bounded_custom(std::vector<std::pair<double, double>> samples,
                                            std::optional<double> cap = std::nullopt);

    /// min(omega, cap); the result is again a continuity modulus.
    ContinuityModulus capped(double cap) const;

    double operator()(double sigma) const;

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    std::optional<double> cap() const noexcept { return cap_; }
    std::string describe() const;

private:
    ContinuityModulus(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
    std::optional<double> cap_;
    std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
};

/// The nonlinearity m : [0, inf) -> [0, inf) together with its primitive M(sigma) = int_0^sigma m.
class Nonlinearity {
public:
    /// m = value
    static Nonlinearity constant(double value);
    /// m(sigma) = a + b sigma
    static Nonlinearity affine(double a, double b);
    /// m(sigma) = coefficient * sigma^exponent
    static Nonlinearity power(double coefficient, double exponent);
    /// Piecewise linear table, constant outside; primitive is exact.
    static Nonlinearity table(std::vector<std::pair<double, double>> samples);
    /// Arbitrary evaluator. Without a closed-form primitive, M is computed by adaptive
    /// Gauss-Kronrod quadrature from cached nodes on [0, cache_extent].
    static Nonlinearity custom(ScalarFunction m, std::optional<ScalarFunction> primitive = std::nullopt,
                               std::string description = "custom", double cache_extent = 64.0);

    double operator()(double sigma) const { return m_(sigma); }
    double primitive(double sigma) const { return primitive_(sigma); }

    /// Lower bound nu > 0 (strict hyperbolicity), when known.
    std::optional<double> nu() const noexcept { return nu_; }
    /// omega-continuity constant L, when known.
    std::optional<double> lipschitz_constant() const noexcept { return L_; }

    Nonlinearity& with_nu(double nu);
    Nonlinearity& with_lipschitz_constant(double L);

    const std::string& describe() const noexcept { return description_; }

private:
    Nonlinearity(ScalarFunction m, ScalarFunction primitive, std::string description)
        : m_(std::move(m)), primitive_(std::move(primitive)), description_(std::move(description)) {}

    ScalarFunction m_;
    ScalarFunction primitive_;
    std::optional<double> nu_;
    std::optional<double> L_;
    std::string description_;
};

struct SampleGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 0;
};

struct HypothesisReport {
    Hyperbolicity mode = Hyperbolicity::strict;
    double lambda_estimate = 0.0;  ///< measured Lambda (max over the grid)
    double worst_sigma = 0.0;      ///< grid point attaining the max
    SampleGrid grid;
    bool satisfied = false;        ///< Lambda finite
};

struct LowerBoundResult {
    bool passed = true;
    double worst_ratio = 0.0;  ///< min of omega(x)(x+1)/(omega(1) x)
    double worst_x = 0.0;
};

struct SubadditivityResult {
    bool passed = true;
    double worst_excess = 0.0;  ///< max of omega(a+b) - (omega(a)+omega(b))
};

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct ComparisonResult {
    Verdict verdict = Verdict::pass;
    double margin = 0.0;  ///< min over samples of RHS(t) - y(t)
};

/// omega(x) >= omega(1) x/(x+1) at every grid point (relative slack 1e-12).
LowerBoundResult lower_bound_check(const ScalarFunction& omega, const std::vector<double>& grid);

/// omega(a+b) <= (omega(a)+omega(b))(1+1e-12) for every pair drawn from the grid.
SubadditivityResult subadditivity_check(const ScalarFunction& omega, const std::vector<double>& grid);

/// Lower estimate of the omega-continuity constant: max |m(a)-m(b)| / omega(|a-b|) over the pairs.
double estimate_L(const ScalarFunction& m, const ScalarFunction& omega,
                  const std::vector<std::pair<double, double>>& pairs);

/// Strict: Lambda = max sigma omega(1/sigma)/phi(sigma).
/// Weak:   Lambda = max sigma / phi(sigma / sqrt(omega(1/sigma))).
HypothesisReport check_hyperbolicity_hypothesis(const ScalarFunction& omega, const WeightPhi& phi,
                                                Hyperbolicity mode, const std::vector<double>& sigma_grid);

/// Default hypothesis grid: geometric, 81 points per decade on [1e-6, 1e6].
std::vector<double> default_hypothesis_grid();

/// Checks y(t) <= exp(int_0^t eta1) * int_0^t eta2 at every sample (trapezoid quadrature).
ComparisonResult comparison_bound_check(const std::vector<double>& t, const std::vector<double>& y,
                                        const std::vector<double>& eta1, const std::vector<double>& eta2);

}  // namespace kirchhoff
