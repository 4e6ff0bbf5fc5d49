#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace kirchhoff {

/// Diagonal nonnegative self-adjoint operator A on a K-mode truncation.
///
/// Stores lambda_k with A e_k = lambda_k^2 e_k, so A^{1/2} multiplies mode k
/// by lambda_k. Eigenvalues must be finite, nonnegative and nondecreasing.
class SpectralOperator {
public:
    explicit SpectralOperator(std::vector<double> eigenvalues);
    SpectralOperator(std::initializer_list<double> eigenvalues)
        : SpectralOperator(std::vector<double>(eigenvalues)) {}

    /// lambda_k = k^power, k = 1..count.
    static SpectralOperator power_law(std::size_t count, double power);

    std::size_t size() const noexcept { return lambda_.size(); }
    double lambda(std::size_t k) const { return lambda_.at(k); }
    std::span<const double> eigenvalues() const noexcept { return lambda_; }

private:
    std::vector<double> lambda_;
};

/// Fourier coefficients u_k of a vector of H in the eigenbasis of A.
///
/// Construction rejects non-finite entries. Arithmetic does not re-check.
class ModeVector {
public:
    ModeVector() = default;
    explicit ModeVector(std::size_t n, double fill = 0.0);
    explicit ModeVector(std::vector<double> coefficients);
    ModeVector(std::initializer_list<double> coefficients)
        : ModeVector(std::vector<double>(coefficients)) {}

    static ModeVector unit(std::size_t n, std::size_t k);

    std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t k) const { return c_[k]; }
    double& operator[](std::size_t k) { return c_[k]; }
    std::span<const double> values() const noexcept { return c_; }
    const std::vector<double>& vector() const noexcept { return c_; }

    auto begin() const noexcept { return c_.begin(); }
    auto end() const noexcept { return c_.end(); }

    bool all_finite() const noexcept;

    ModeVector& operator+=(const ModeVector& other);
    ModeVector& operator-=(const ModeVector& other);
    ModeVector& operator*=(double a);

    /// this += a * x
    ModeVector& axpy(double a, const ModeVector& x);

    friend bool operator==(const ModeVector&, const ModeVector&) = default;

private:
    std::vector<double> c_;
};

ModeVector operator+(ModeVector a, const ModeVector& b);
ModeVector operator-(ModeVector a, const ModeVector& b);
ModeVector operator*(double a, ModeVector v);

/// Pair (u, u') at simulation time t.
struct PhaseState {
    ModeVector position;
    ModeVector velocity;
    double time = 0.0;

    PhaseState() = default;
    PhaseState(ModeVector u, ModeVector v, double t = 0.0);
};

/// Weight phi: [0, inf) -> (0, inf) used in the exponential factor of the Gevrey norms.
class WeightPhi {
public:
    enum class Kind { power, identity, constant, logarithmic, table };

    /// phi(sigma) = sigma^p, p > 0.
    static WeightPhi power(double exponent);
    /// phi(sigma) = sigma.
    static WeightPhi identity();
    /// phi(sigma) = value > 0.
    static WeightPhi constant(double value);
    /// phi(sigma) = 1 + log(1 + sigma).
    static WeightPhi logarithmic();
    /// Piecewise linear through (sigma_i, value_i), held constant outside the table.
    static WeightPhi table(std::vector<std::pair<double, double>> samples);

    double operator()(double sigma) const;

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }

private:
    WeightPhi(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
    std::vector<std::pair<double, double>> table_;
};

struct GevreyParams {
    WeightPhi phi = WeightPhi::identity();
    double r = 1.0;
    double alpha = 0.0;

    /// Throws ParameterError unless r > 0 and alpha >= 0.
    void validate() const;
};

/// Value of a Gevrey norm; `infinite` is set when the sum leaves the double range.
struct GevreyNorm {
    double value = 0.0;
    bool infinite = false;

    bool finite() const noexcept { return !infinite; }
};

/// Components lambda_k^{2 alpha} u_k. A zero eigenvalue maps to 0 for alpha > 0.
ModeVector apply_power(const SpectralOperator& op, double alpha, const ModeVector& u);

double inner(const ModeVector& u, const ModeVector& v);

/// |u|^2
double norm_squared(const ModeVector& u);

/// |A^{1/2} u|^2 = sum lambda_k^2 u_k^2
double half_power_norm_squared(const SpectralOperator& op, const ModeVector& u);

/// |A u|^2 = sum lambda_k^4 u_k^2
double power_norm_squared(const SpectralOperator& op, const ModeVector& u);

/// <A u, v> = sum lambda_k^2 u_k v_k
double operator_inner(const SpectralOperator& op, const ModeVector& u, const ModeVector& v);

/// <A^{1/2} u, v> = sum lambda_k u_k v_k
double half_operator_inner(const SpectralOperator& op, const ModeVector& u, const ModeVector& v);

/// ( sum_k lambda_k^{4 alpha} u_k^2 exp(r phi(lambda_k)) )^{1/2}, evaluated in log space.
GevreyNorm gevrey_norm(const SpectralOperator& op, const ModeVector& u, const GevreyParams& p);

/// Membership test for G_{phi,r,alpha}(A): an infinite norm means "not in the space".
bool in_gevrey_space(const SpectralOperator& op, const ModeVector& u, const GevreyParams& p);

void check_dimensions(const SpectralOperator& op, const ModeVector& u);
void check_dimensions(const ModeVector& u, const ModeVector& v);

}  // namespace kirchhoff
