#include "kirchhoff/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

std::string to_string(Hyperbolicity mode) { return mode == Hyperbolicity::strict ? "strict" : "weak"; }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

using Table = std::vector<std::pair<double, double>>;

double interpolate(const Table& table, double x) {
    if (x <= table.front().first) return table.front().second;
    if (x >= table.back().first) return table.back().second;
    auto hi = std::upper_bound(table.begin(), table.end(), x, [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

Table sorted_table(Table samples, const char* what) {
    if (samples.empty()) throw ParameterError(fmt::format("{} table is empty", what));
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
            throw ParameterError(fmt::format("{} table has non-finite entries", what));
        if (samples[i].first < 0.0) throw ParameterError(fmt::format("{} table abscissae must be >= 0", what));
        if (i > 0 && samples[i].first == samples[i - 1].first)
            throw ParameterError(fmt::format("{} table has duplicate abscissae", what));
    }
    return samples;
}

double gauss_kronrod(const ScalarFunction& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuityModulus

ContinuityModulus ContinuityModulus::linear() { return ContinuityModulus(Kind::linear, 1.0); }

ContinuityModulus ContinuityModulus::holder(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("Hoelder exponent must lie in (0,1)");
    return ContinuityModulus(Kind::holder, beta);
}

ContinuityModulus ContinuityModulus::log_lipschitz() { return ContinuityModulus(Kind::log_lipschitz, 1.0); }

ContinuityModulus ContinuityModulus::bounded_custom(Table samples, std::optional<double> cap) {
    samples = sorted_table(std::move(samples), "modulus");
    if (samples.front().first != 0.0 || samples.front().second != 0.0)
        throw ParameterError("modulus table must start at (0, 0)");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].second < samples[i - 1].second) throw ParameterError("modulus table must be nondecreasing");
    ContinuityModulus w(Kind::bounded_custom, 0.0);
    w.table_ = std::make_shared<const Table>(std::move(samples));
    double default_cap = 2.0 * interpolate(*w.table_, 1.0);
    double c = cap.value_or(default_cap);
    if (!(c > 0.0)) throw ParameterError("modulus cap must be positive");
    w.cap_ = c;
    return w;
}

ContinuityModulus ContinuityModulus::capped(double cap) const {
    if (!(cap > 0.0)) throw ParameterError("modulus cap must be positive");
    ContinuityModulus w = *this;
    w.cap_ = cap_ ? std::min(*cap_, cap) : cap;
    return w;
}

double ContinuityModulus::operator()(double sigma) const {
    double v = 0.0;
    if (sigma > 0.0) {
        switch (kind_) {
            case Kind::linear: v = sigma; break;
            case Kind::holder: v = std::pow(sigma, param_); break;
            case Kind::log_lipschitz: v = sigma * (1.0 + std::log1p(1.0 / sigma)); break;
            case Kind::bounded_custom: v = interpolate(*table_, sigma); break;
        }
    }
    return cap_ ? std::min(v, *cap_) : v;
}

std::string ContinuityModulus::describe() const {
    std::string base;
    switch (kind_) {
        case Kind::linear: base = "linear"; break;
        case Kind::holder: base = fmt::format("holder({})", param_); break;
        case Kind::log_lipschitz: base = "log_lipschitz"; break;
        case Kind::bounded_custom: base = fmt::format("bounded_custom[{} samples]", table_->size()); break;
    }
    if (cap_) base += fmt::format(" cap={}", *cap_);
    return base;
}

// ---------------------------------------------------------------------------
// Nonlinearity

Nonlinearity Nonlinearity::constant(double value) {
    if (!(value >= 0.0)) throw ModelError("m must be nonnegative");
    Nonlinearity n([value](double) { return value; }, [value](double s) { return value * s; },
                   fmt::format("constant({})", value));
    if (value > 0.0) n.nu_ = value;
    n.L_ = 0.0;
    return n;
}

Nonlinearity Nonlinearity::affine(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw ModelError("affine m needs a >= 0 and b >= 0");
    Nonlinearity n([a, b](double s) { return a + b * s; }, [a, b](double s) { return a * s + 0.5 * b * s * s; },
                   fmt::format("affine({}, {})", a, b));
    if (a > 0.0) n.nu_ = a;
    n.L_ = b;
    return n;
}

Nonlinearity Nonlinearity::power(double coefficient, double exponent) {
    if (!(coefficient >= 0.0) || !(exponent >= 0.0)) throw ModelError("power m needs nonnegative parameters");
    Nonlinearity n([coefficient, exponent](double s) { return coefficient * std::pow(s, exponent); },
                   [coefficient, exponent](double s) {
                       return coefficient * std::pow(s, exponent + 1.0) / (exponent + 1.0);
                   },
                   fmt::format("power({}, {})", coefficient, exponent));
    if (exponent == 0.0 && coefficient > 0.0) n.nu_ = coefficient;
    if (exponent <= 1.0) n.L_ = coefficient;
    return n;
}

Nonlinearity Nonlinearity::table(Table samples) {
    auto t = std::make_shared<const Table>(sorted_table(std::move(samples), "nonlinearity"));
    for (const auto& [x, y] : *t)
        if (y < 0.0) throw ModelError("nonlinearity table values must be nonnegative");

    // cumulative primitive at the table nodes
    auto nodes = std::make_shared<std::vector<double>>(t->size(), 0.0);
    (*nodes)[0] = t->front().second * t->front().first;
    for (std::size_t i = 1; i < t->size(); ++i)
        (*nodes)[i] = (*nodes)[i - 1] + 0.5 * ((*t)[i].first - (*t)[i - 1].first) * ((*t)[i].second + (*t)[i - 1].second);

    auto m = [t](double s) { return interpolate(*t, s); };
    auto primitive = [t, nodes](double s) {
        if (s <= t->front().first) return t->front().second * s;
        if (s >= t->back().first) return nodes->back() + t->back().second * (s - t->back().first);
        auto hi = std::upper_bound(t->begin(), t->end(), s, [](double v, const auto& p) { return v < p.first; });
        auto i = static_cast<std::size_t>(hi - t->begin()) - 1;
        double ms = interpolate(*t, s);
        return (*nodes)[i] + 0.5 * (s - (*t)[i].first) * ((*t)[i].second + ms);
    };
    Nonlinearity n(m, primitive, fmt::format("table[{} samples]", t->size()));
    double lo = std::min_element(t->begin(), t->end(), [](auto& a, auto& b) { return a.second < b.second; })->second;
    if (lo > 0.0) n.nu_ = lo;
    return n;
}

Nonlinearity Nonlinearity::custom(ScalarFunction m, std::optional<ScalarFunction> primitive, std::string description,
                                  double cache_extent) {
    if (!m) throw ParameterError("nonlinearity evaluator is empty");
    if (primitive) return Nonlinearity(std::move(m), std::move(*primitive), std::move(description));
    if (!(cache_extent > 0.0)) throw ParameterError("primitive cache extent must be positive");

    constexpr std::size_t cells = 512;
    double h = cache_extent / cells;
    auto nodes = std::make_shared<std::vector<double>>(cells + 1, 0.0);
    for (std::size_t i = 1; i <= cells; ++i)
        (*nodes)[i] = (*nodes)[i - 1] + gauss_kronrod(m, (i - 1) * h, i * h);

    auto prim = [m, nodes, h, cells](double s) {
        if (s <= 0.0) return 0.0;
        auto i = std::min(static_cast<std::size_t>(s / h), cells);
        return (*nodes)[i] + gauss_kronrod(m, i * h, s);
    };
    return Nonlinearity(std::move(m), prim, std::move(description));
}

Nonlinearity& Nonlinearity::with_nu(double nu) {
    if (!(nu > 0.0)) throw ParameterError("nu must be positive");
    nu_ = nu;
    return *this;
}

Nonlinearity& Nonlinearity::with_lipschitz_constant(double L) {
    if (!(L >= 0.0)) throw ParameterError("L must be nonnegative");
    L_ = L;
    return *this;
}

// ---------------------------------------------------------------------------
// checks

LowerBoundResult lower_bound_check(const ScalarFunction& omega, const std::vector<double>& grid) {
    LowerBoundResult out;
    out.worst_ratio = std::numeric_limits<double>::infinity();
    double w1 = omega(1.0);
    for (double x : grid) {
        if (!(x > 0.0)) throw ParameterError("lower_bound_check grid must be positive");
        double ratio = omega(x) * (x + 1.0) / (w1 * x);
        if (ratio < out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst_x = x;
        }
    }
    out.passed = out.worst_ratio >= 1.0 - 1e-12;
    return out;
}

SubadditivityResult subadditivity_check(const ScalarFunction& omega, const std::vector<double>& grid) {
    SubadditivityResult out;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (double a : grid) {
        double wa = omega(a);
        for (double b : grid) {
            double wb = omega(b);
            double lhs = omega(a + b);
            out.worst_excess = std::max(out.worst_excess, lhs - (wa + wb));
            if (lhs > (wa + wb) * (1.0 + 1e-12)) out.passed = false;
        }
    }
    return out;
}

double estimate_L(const ScalarFunction& m, const ScalarFunction& omega,
                  const std::vector<std::pair<double, double>>& pairs) {
    double best = 0.0;
    for (auto [a, b] : pairs) {
        if (a == b) throw ParameterError("estimate_L needs pairs with a != b");
        double dm = std::abs(m(a) - m(b));
        double w = omega(std::abs(a - b));
        if (w == 0.0) {
            if (dm != 0.0)
                throw DegenerateModulusError(fmt::format("omega(|{} - {}|) = 0 but m differs by {}", a, b, dm));
            continue;
        }
        best = std::max(best, dm / w);
    }
    return best;
}

std::vector<double> default_hypothesis_grid() { return quadrature::geometric_grid(1e-6, 1e6, 81); }

HypothesisReport check_hyperbolicity_hypothesis(const ScalarFunction& omega, const WeightPhi& phi, Hyperbolicity mode,
                                                const std::vector<double>& sigma_grid) {
    if (sigma_grid.empty()) throw ParameterError("hypothesis grid is empty");
    HypothesisReport r;
    r.mode = mode;
    r.grid = {*std::min_element(sigma_grid.begin(), sigma_grid.end()),
              *std::max_element(sigma_grid.begin(), sigma_grid.end()), sigma_grid.size()};
    double lam = 0.0;
    for (double sigma : sigma_grid) {
        if (!(sigma > 0.0)) throw ParameterError("hypothesis grid must be positive");
        double ratio = 0.0;
        if (mode == Hyperbolicity::strict) {
            double p = phi(sigma);
            if (!(p > 0.0)) throw InvalidWeightError(fmt::format("phi({}) = {} is not positive", sigma, p));
            ratio = sigma * omega(1.0 / sigma) / p;
        } else {
            double w = omega(1.0 / sigma);
            if (!(w > 0.0)) {
                ratio = std::numeric_limits<double>::infinity();
            } else {
                double arg = sigma / std::sqrt(w);
                double p = phi(arg);
                if (!(p > 0.0)) throw InvalidWeightError(fmt::format("phi({}) = {} is not positive", arg, p));
                ratio = sigma / p;
            }
        }
        if (!(ratio <= lam)) {
            lam = ratio;
            r.worst_sigma = sigma;
        }
    }
    r.lambda_estimate = lam;
    r.satisfied = std::isfinite(lam);
    return r;
}

ComparisonResult comparison_bound_check(const std::vector<double>& t, const std::vector<double>& y,
                                        const std::vector<double>& eta1, const std::vector<double>& eta2) {
    if (t.size() != y.size() || t.size() != eta1.size() || t.size() != eta2.size())
        throw DimensionError("comparison_bound_check: sample arrays differ in length");
    if (t.empty()) return {};
    if (y.front() != 0.0) throw ParameterError("comparison_bound_check needs y(0) = 0");

    auto i1 = quadrature::cumulative_trapezoid(t, eta1);
    auto i2 = quadrature::cumulative_trapezoid(t, eta2);
    ComparisonResult out;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        double rhs = std::exp(i1[i]) * i2[i];
        if (!std::isfinite(rhs)) return {Verdict::inconclusive, std::numeric_limits<double>::quiet_NaN()};
        out.margin = std::min(out.margin, rhs - y[i]);
        if (y[i] > rhs + 1e-12 * std::abs(rhs)) out.verdict = Verdict::fail;
    }
    return out;
}

}  // namespace kirchhoff
