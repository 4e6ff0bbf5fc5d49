#include "kirchhoff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues) : lambda_(std::move(eigenvalues)) {
    if (lambda_.empty()) throw ParameterError("spectral operator needs at least one mode");
    for (std::size_t k = 0; k < lambda_.size(); ++k) {
        if (!std::isfinite(lambda_[k]) || lambda_[k] < 0.0)
            throw ParameterError("eigenvalue " + std::to_string(k + 1) + " must be finite and nonnegative");
        if (k > 0 && lambda_[k] < lambda_[k - 1])
            throw ParameterError("eigenvalues must be given in nondecreasing order");
    }
}

SpectralOperator SpectralOperator::power_law(std::size_t count, double power) {
    if (count == 0) throw ParameterError("spectral operator needs at least one mode");
    if (!(power >= 0.0)) throw ParameterError("eigenvalue rule k^p needs p >= 0");
    std::vector<double> lambda(count);
    for (std::size_t k = 0; k < count; ++k) lambda[k] = std::pow(static_cast<double>(k + 1), power);
    return SpectralOperator(std::move(lambda));
}

ModeVector::ModeVector(std::size_t n, double fill) : c_(n, fill) {
    if (!std::isfinite(fill)) throw ParameterError("mode coefficients must be finite");
}

ModeVector::ModeVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    if (!all_finite()) throw ParameterError("mode coefficients must be finite");
}

ModeVector ModeVector::unit(std::size_t n, std::size_t k) {
    ModeVector e(n);
    e.c_.at(k) = 1.0;
    return e;
}

bool ModeVector::all_finite() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](double x) { return std::isfinite(x); });
}

ModeVector& ModeVector::operator+=(const ModeVector& other) {
    check_dimensions(*this, other);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += other.c_[k];
    return *this;
}

ModeVector& ModeVector::operator-=(const ModeVector& other) {
    check_dimensions(*this, other);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= other.c_[k];
    return *this;
}

ModeVector& ModeVector::operator*=(double a) {
    for (double& x : c_) x *= a;
    return *this;
}

ModeVector& ModeVector::axpy(double a, const ModeVector& x) {
    check_dimensions(*this, x);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += a * x.c_[k];
    return *this;
}

ModeVector operator+(ModeVector a, const ModeVector& b) { return a += b; }
ModeVector operator-(ModeVector a, const ModeVector& b) { return a -= b; }
ModeVector operator*(double a, ModeVector v) { return v *= a; }

PhaseState::PhaseState(ModeVector u, ModeVector v, double t)
    : position(std::move(u)), velocity(std::move(v)), time(t) {
    check_dimensions(position, velocity);
}

WeightPhi WeightPhi::power(double exponent) {
    if (!(exponent > 0.0)) throw ParameterError("power weight needs a positive exponent");
    return WeightPhi(Kind::power, exponent);
}

WeightPhi WeightPhi::identity() { return WeightPhi(Kind::identity, 1.0); }

WeightPhi WeightPhi::constant(double value) {
    if (!(value > 0.0)) throw InvalidWeightError("constant weight must be positive");
    return WeightPhi(Kind::constant, value);
}

WeightPhi WeightPhi::logarithmic() { return WeightPhi(Kind::logarithmic, 1.0); }

WeightPhi WeightPhi::table(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) throw ParameterError("weight table is empty");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].first < 0.0) throw ParameterError("weight table abscissae must be nonnegative");
        if (!(samples[i].second > 0.0)) throw InvalidWeightError("weight table values must be positive");
        if (i > 0 && samples[i].first == samples[i - 1].first)
            throw ParameterError("weight table has duplicate abscissae");
    }
    WeightPhi phi(Kind::table, 0.0);
    phi.table_ = std::move(samples);
    return phi;
}

double WeightPhi::operator()(double sigma) const {
    switch (kind_) {
        case Kind::power: return std::pow(sigma, param_);
        case Kind::identity: return sigma;
        case Kind::constant: return param_;
        case Kind::logarithmic: return 1.0 + std::log1p(sigma);
        case Kind::table: {
            if (sigma <= table_.front().first) return table_.front().second;
            if (sigma >= table_.back().first) return table_.back().second;
            auto hi = std::upper_bound(table_.begin(), table_.end(), sigma,
                                       [](double x, const auto& p) { return x < p.first; });
            auto lo = hi - 1;
            double t = (sigma - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
        }
    }
    return 0.0;
}

void GevreyParams::validate() const {
    if (!(r > 0.0)) throw ParameterError("Gevrey radius r must be positive");
    if (!(alpha >= 0.0)) throw ParameterError("Sobolev exponent alpha must be nonnegative");
}

void check_dimensions(const SpectralOperator& op, const ModeVector& u) {
    if (op.size() != u.size())
        throw DimensionError("vector has " + std::to_string(u.size()) + " modes, operator has " +
                             std::to_string(op.size()));
}

void check_dimensions(const ModeVector& u, const ModeVector& v) {
    if (u.size() != v.size())
        throw DimensionError("vector lengths differ: " + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()));
}

namespace {

double eigen_power(double lambda, double exponent) {
    if (exponent == 0.0) return 1.0;
    if (lambda == 0.0) return 0.0;
    return std::pow(lambda, exponent);
}

}  // namespace

ModeVector apply_power(const SpectralOperator& op, double alpha, const ModeVector& u) {
    check_dimensions(op, u);
    if (!(alpha >= 0.0)) throw ParameterError("apply_power needs alpha >= 0");
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = eigen_power(op.lambda(k), 2.0 * alpha) * u[k];
    return ModeVector(std::move(out));
}

double inner(const ModeVector& u, const ModeVector& v) {
    check_dimensions(u, v);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * v[k];
    return sum;
}

double norm_squared(const ModeVector& u) { return inner(u, u); }

double half_power_norm_squared(const SpectralOperator& op, const ModeVector& u) {
    check_dimensions(op, u);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double a = op.lambda(k) * u[k];
        sum += a * a;
    }
    return sum;
}

double power_norm_squared(const SpectralOperator& op, const ModeVector& u) {
    check_dimensions(op, u);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double l = op.lambda(k);
        double a = l * l * u[k];
        sum += a * a;
    }
    return sum;
}

double operator_inner(const SpectralOperator& op, const ModeVector& u, const ModeVector& v) {
    check_dimensions(op, u);
    check_dimensions(u, v);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double l = op.lambda(k);
        sum += l * l * u[k] * v[k];
    }
    return sum;
}

double half_operator_inner(const SpectralOperator& op, const ModeVector& u, const ModeVector& v) {
    check_dimensions(op, u);
    check_dimensions(u, v);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) sum += op.lambda(k) * u[k] * v[k];
    return sum;
}

GevreyNorm gevrey_norm(const SpectralOperator& op, const ModeVector& u, const GevreyParams& p) {
    check_dimensions(op, u);
    p.validate();

    // log of each summand; empty summands are skipped
    std::vector<double> logs;
    logs.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        double l = op.lambda(k);
        if (u[k] == 0.0) continue;
        if (l == 0.0 && p.alpha > 0.0) continue;
        double lw = (p.alpha > 0.0 ? 4.0 * p.alpha * std::log(l) : 0.0);
        logs.push_back(lw + 2.0 * std::log(std::abs(u[k])) + p.r * p.phi(l));
    }
    if (logs.empty()) return {0.0, false};

    double top = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(top)) return {std::numeric_limits<double>::infinity(), true};
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - top);
    double log_norm = 0.5 * (top + std::log(acc));
    if (log_norm >= std::log(std::numeric_limits<double>::max()))
        return {std::numeric_limits<double>::infinity(), true};
    return {std::exp(log_norm), false};
}

bool in_gevrey_space(const SpectralOperator& op, const ModeVector& u, const GevreyParams& p) {
    return gevrey_norm(op, u, p).finite();
}

}  // namespace kirchhoff
