#include "kirchhoff/reparam.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "kirchhoff/csv.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

std::vector<double> STrajectory::s_values() const {
    std::vector<double> s(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) s[i] = states[i].s;
    return s;
}

int StartupParams::orientation() const {
    if (D1 > 0.0) return 1;
    if (D1 < 0.0) return -1;
    if (beta > 0.0) return 1;
    if (beta < 0.0) return -1;
    throw DegenerateDataError("<A u0, u1> = 0 and |A^{1/2}u1|^2 = m(s0)|A u0|^2: criterion violated");
}

StartupParams startup_params(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                             const ModeVector& u1, double s_start) {
    auto sig = initial_signature(op, m, u0, u1);
    return {0.5 * sig.psi_prime0, 0.5 * sig.psi_second0, s_start};
}

namespace {

double oriented_denominator(const SpectralOperator& op, const std::vector<double>& z, const std::vector<double>& w,
                            int orientation) {
    double acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) acc += op.lambda(k) * z[k] * w[k];
    return 2.0 * orientation * acc;
}

// d/dt of the oriented denominator: orientation * 2 (|A^{1/2}w|^2 - c |A^{1/2}z|^2)
double denominator_rate(const SpectralOperator& op, const std::vector<double>& z, const std::vector<double>& w,
                        double c, int orientation) {
    double acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double l2 = op.lambda(k) * op.lambda(k);
        acc += l2 * (w[k] * w[k] - c * z[k] * z[k]);
    }
    return 2.0 * orientation * acc;
}

struct Pair {
    std::vector<double> z, w;
};

// Right-hand side in s (scale(s, d) = 1/d) or in tau = sqrt(s) (scale = 2 tau / d).
class SSystem {
public:
    SSystem(const SpectralOperator& op, const Coefficient& c, int orientation)
        : op_(op), c_(c), orientation_(orientation) {}

    // derivative with respect to s
    void in_s(double s, const Pair& y, Pair& dy) const {
        double d = oriented_denominator(op_, y.z, y.w, orientation_);
        if (!(d > 0.0)) throw SingularDenominatorError(s, d);
        apply(s, y, dy, 1.0 / d);
    }

    // derivative with respect to tau; `limit` is the value of 2 tau / d at tau = 0
    void in_tau(double tau, const Pair& y, Pair& dy, double limit) const {
        double ratio = limit;
        if (tau > 0.0) {
            double d = oriented_denominator(op_, y.z, y.w, orientation_);
            if (!(d > 0.0)) throw SingularDenominatorError(tau * tau, d);
            ratio = 2.0 * tau / d;
        }
        apply(tau * tau, y, dy, ratio);
    }

private:
    void apply(double s, const Pair& y, Pair& dy, double factor) const {
        double cs = c_(s);
        for (std::size_t k = 0; k < y.z.size(); ++k) {
            double l = op_.lambda(k);
            dy.z[k] = factor * l * y.w[k];
            dy.w[k] = -factor * cs * l * y.z[k];
        }
    }

    const SpectralOperator& op_;
    const Coefficient& c_;
    int orientation_;
};

template <class Rhs>
void rk4_step(double x, double h, Pair& y, Rhs&& f) {
    const std::size_t n = y.z.size();
    Pair k1{std::vector<double>(n), std::vector<double>(n)}, k2 = k1, k3 = k1, k4 = k1, tmp = k1;
    auto stage = [&](const Pair& k, double a) {
        for (std::size_t i = 0; i < n; ++i) {
            tmp.z[i] = y.z[i] + a * k.z[i];
            tmp.w[i] = y.w[i] + a * k.w[i];
        }
    };
    f(x, y, k1);
    stage(k1, 0.5 * h);
    f(x + 0.5 * h, tmp, k2);
    stage(k2, 0.5 * h);
    f(x + 0.5 * h, tmp, k3);
    stage(k3, h);
    f(x + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
        y.z[i] += h / 6.0 * (k1.z[i] + 2.0 * k2.z[i] + 2.0 * k3.z[i] + k4.z[i]);
        y.w[i] += h / 6.0 * (k1.w[i] + 2.0 * k2.w[i] + 2.0 * k3.w[i] + k4.w[i]);
    }
}

bool finite(const Pair& y) {
    for (std::size_t i = 0; i < y.z.size(); ++i)
        if (!std::isfinite(y.z[i]) || !std::isfinite(y.w[i])) return false;
    return true;
}

}  // namespace

SRhs s_rhs(const SpectralOperator& op, const SState& state, const Coefficient& c, int orientation) {
    check_dimensions(op, state.z);
    check_dimensions(op, state.w);
    double d = oriented_denominator(op, state.z.vector(), state.w.vector(), orientation);
    if (!(d > 0.0)) throw SingularDenominatorError(state.s, d);
    std::vector<double> dz(op.size()), dw(op.size());
    double cs = c(state.s);
    for (std::size_t k = 0; k < op.size(); ++k) {
        dz[k] = op.lambda(k) * state.w[k] / d;
        dw[k] = -cs * op.lambda(k) * state.z[k] / d;
    }
    return {ModeVector(std::move(dz)), ModeVector(std::move(dw)), d};
}

STrajectory integrate_s(const SpectralOperator& op, const Coefficient& c, const StartupParams& startup,
                        const ModeVector& z0, const ModeVector& w0, double s_max, const SIntegratorConfig& cfg) {
    check_dimensions(op, z0);
    check_dimensions(op, w0);
    if (!(cfg.ds > 0.0)) throw ParameterError("ds must be positive");
    if (!(s_max > 0.0)) throw ParameterError("s_max must be positive");
    if (cfg.startup_substeps < 1) throw ParameterError("startup_substeps must be >= 1");

    const int orientation = startup.orientation();
    const double beta_o = orientation * startup.beta;
    const double s_start = std::min(startup.s_start > 0.0 ? startup.s_start : 16.0 * cfg.ds, s_max);
    const bool singular_start = beta_o > 0.0 && startup.D1 * startup.D1 <= beta_o * s_start;
    const double gamma1_ref = singular_start ? std::sqrt(beta_o) : std::abs(startup.D1) / std::sqrt(s_max);

    STrajectory out{op, {}, orientation, {}, {}, startup.D1, startup.beta, 0.0, false, std::nullopt, {}};
    SSystem system(op, c, orientation);
    Pair y{z0.vector(), w0.vector()};

    auto push = [&](double s) -> bool {
        double d = oriented_denominator(op, y.z, y.w, orientation);
        if (s > 0.0 && (!(d > 0.0) || 0.5 * d <= 0.5 * gamma1_ref * std::sqrt(s) || !finite(y))) {
            out.truncated = true;
            out.degeneracy_s = s;
            return false;
        }
        out.states.push_back({s, ModeVector(y.z), ModeVector(y.w)});
        out.denom.push_back(d);
        out.denom_rate.push_back(denominator_rate(op, y.z, y.w, c(s), orientation));
        return true;
    };

    push(0.0);
    double s = 0.0;
    bool alive = true;
    try {
        if (singular_start) {
            const double tau_end = std::sqrt(s_start);
            const double dtau = tau_end / cfg.startup_substeps;
            // 2 tau / d -> 1/sqrt(beta) as tau -> 0 when D1 = 0; a D1 that is resolved by the
            // first substep keeps the regular value 0
            const double limit = std::abs(startup.D1) > 1e-3 * std::sqrt(beta_o) * dtau ? 0.0 : 1.0 / std::sqrt(beta_o);
            auto f = [&](double tau, const Pair& state, Pair& dy) { system.in_tau(tau, state, dy, limit); };
            for (int i = 0; i < cfg.startup_substeps && alive; ++i) {
                double tau = i * dtau;
                rk4_step(tau, dtau, y, f);
                double next = (i + 1 == cfg.startup_substeps) ? tau_end : tau + dtau;
                s = (i + 1 == cfg.startup_substeps) ? s_start : next * next;
                alive = push(s);
            }
        }
        auto f = [&](double x, const Pair& state, Pair& dy) { system.in_s(x, state, dy); };
        while (alive && s < s_max * (1.0 - 1e-14)) {
            double h = std::min(cfg.ds, s_max - s);
            rk4_step(s, h, y, f);
            s = (s + h >= s_max * (1.0 - 1e-14)) ? s_max : s + h;
            alive = push(s);
        }
    } catch (const SingularDenominatorError& e) {
        out.truncated = true;
        out.degeneracy_s = e.s();
    }

    out.time = recover_time(out);
    out.gamma1_measured = measure_gamma1(out);
    return out;
}

std::vector<double> recover_time(const std::vector<double>& s, const std::vector<double>& g) {
    return recover_time(s, g, {});
}

std::vector<double> recover_time(const std::vector<double>& s, const std::vector<double>& g,
                                 const std::vector<double>& rate) {
    if (s.size() != g.size()) throw DimensionError("recover_time: s and g differ in length");
    if (!rate.empty() && rate.size() != g.size()) throw DimensionError("recover_time: rate and g differ in length");
    std::vector<double> t(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i] > s[i - 1])) throw ParameterError("recover_time needs strictly increasing s");
        if (!(g[i] > 0.0)) throw DegenerateDataError(fmt::format("g(s) <= 0 at s={}", s[i]));
        double sum = g[i] + g[i - 1];
        if (!(sum > 0.0)) throw DegenerateDataError("t(s) is not integrable");
        double dt = 2.0 * (s[i] - s[i - 1]) / sum;
        if (!rate.empty()) {
            // g(t) as a cubic Hermite in t: ds = dt (g0 + g1)/2 + dt^2 (g0' - g1')/12, solved for dt
            double a = (rate[i - 1] - rate[i]) / 12.0, b = 0.5 * sum, ds = s[i] - s[i - 1];
            double disc = b * b + 4.0 * a * ds;
            if (disc >= 0.0) dt = 2.0 * ds / (b + std::sqrt(disc));
        }
        t[i] = t[i - 1] + dt;
    }
    return t;
}

std::vector<double> recover_time(const STrajectory& traj) {
    if (!traj.denom.empty() && traj.denom.front() <= 0.0 && traj.size() > 1 && !(traj.oriented_beta() > 0.0))
        throw DegenerateDataError("D1 = 0 and beta = 0: 1/d(s) is not integrable at s = 0");
    return recover_time(traj.s_values(), traj.denom, traj.denom_rate);
}

namespace {

// int f ds = int f d dt cell by cell: f and d are smooth in t at both square-root ends of the
// window, where they are not smooth in s. Cubic Lagrange on four neighbouring nodes, 4-point Gauss.
std::vector<double> cumulative_in_time(const std::vector<double>& t, const std::vector<double>& f,
                                       const std::vector<double>& d) {
    static constexpr std::array<double, 4> x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
    static constexpr std::array<double, 4> w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};
    const std::size_t n = t.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t j0 = i == 0 ? 0 : std::min(i - 1, n - 4);
        double a = t[i], b = t[i + 1], acc = 0.0;
        for (std::size_t q = 0; q < 4; ++q) {
            double tq = 0.5 * (a + b) + 0.5 * (b - a) * x[q];
            double fq = 0.0, dq = 0.0;
            for (std::size_t k = j0; k < j0 + 4; ++k) {
                double l = 1.0;
                for (std::size_t m = j0; m < j0 + 4; ++m)
                    if (m != k) l *= (tq - t[m]) / (t[k] - t[m]);
                fq += l * f[k];
                dq += l * d[k];
            }
            acc += w[q] * fq * dq;
        }
        out[i + 1] = out[i] + 0.5 * (b - a) * acc;
    }
    return out;
}

}  // namespace

IdentityReport denominator_identity(const STrajectory& traj, const Coefficient& c, double D1) {
    const std::size_t n = traj.size();
    std::vector<double> s(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& st = traj.states[i];
        s[i] = st.s;
        f[i] = half_power_norm_squared(traj.op, st.w) - c(st.s) * half_power_norm_squared(traj.op, st.z);
    }
    auto F = traj.time.size() == n && n >= 4 ? cumulative_in_time(traj.time, f, traj.denom)
                                             : quadrature::cumulative_trapezoid(s, f);
    IdentityReport r;
    r.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rad = D1 * D1 + traj.orientation * F[i];
        if (rad < -1e-10) r.violations.push_back(i);
        double rhs = std::sqrt(std::max(rad, 0.0));
        r.residuals[i] = std::abs(0.5 * traj.denom[i] - rhs);
        r.max_residual = std::max(r.max_residual, r.residuals[i]);
    }
    return r;
}

MonotoneWindow monotone_window(const Trajectory& traj) {
    const auto& samples = traj.samples;
    if (samples.size() < 2) throw StationaryDataError("trajectory has fewer than two samples");
    const double s0 = half_power_norm_squared(traj.op, samples.front().position);
    const double hysteresis = 1e-12 * (1.0 + s0);

    std::vector<double> psi(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) psi[i] = half_power_norm_squared(traj.op, samples[i].position) - s0;

    int orientation = 0;
    for (std::size_t i = 1; i < samples.size() && orientation == 0; ++i) {
        double diff = psi[i] - psi[i - 1];
        if (std::abs(diff) > hysteresis) orientation = diff > 0.0 ? 1 : -1;
    }
    if (orientation == 0) throw StationaryDataError("psi is constant on the sampled window");

    std::size_t end = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        double diff = orientation * (psi[i] - psi[i - 1]);
        double slope = orientation * 2.0 * operator_inner(traj.op, samples[i].position, samples[i].velocity);
        if (!(diff > hysteresis) || !(slope > 0.0)) break;
        end = i;
    }
    if (end == 0) throw StationaryDataError("psi has no monotone window at t = 0");
    return {end, samples[end].time, orientation * psi[end], orientation};
}

namespace {

struct Hermite {
    double h00, h10, h01, h11;
    explicit Hermite(double t) {
        double t2 = t * t, t3 = t2 * t;
        h00 = 2 * t3 - 3 * t2 + 1;
        h10 = t3 - 2 * t2 + t;
        h01 = -2 * t3 + 3 * t2;
        h11 = t3 - t2;
    }
    double operator()(double p0, double m0, double p1, double m1, double h) const {
        return h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1;
    }
};

}  // namespace

STrajectory to_s_trajectory(const Trajectory& traj, std::size_t points) {
    const auto window = monotone_window(traj);
    const auto& samples = traj.samples;
    const auto& op = traj.op;
    const std::size_t K = op.size();
    const std::size_t n = window.end_index + 1;
    const int sigma = window.orientation;
    const double s0 = half_power_norm_squared(op, samples.front().position);

    std::vector<double> S(n), slope(n);
    std::vector<ModeVector> accel(n);
    for (std::size_t i = 0; i < n; ++i) {
        S[i] = sigma * (half_power_norm_squared(op, samples[i].position) - s0);
        slope[i] = sigma * 2.0 * operator_inner(op, samples[i].position, samples[i].velocity);
        accel[i] = acceleration(op, traj.m, samples[i].position);
    }
    S[0] = 0.0;

    // Fritsch-Carlson limiting keeps each cubic cell of t -> s monotone
    std::vector<double> m0(n - 1), m1(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = samples[i + 1].time - samples[i].time;
        double secant = (S[i + 1] - S[i]) / h;
        double a = std::max(slope[i], 0.0) / secant, b = std::max(slope[i + 1], 0.0) / secant;
        double r = a * a + b * b;
        double scale = r > 9.0 ? 3.0 / std::sqrt(r) : 1.0;
        m0[i] = scale * a * secant;
        m1[i] = scale * b * secant;
    }

    const std::size_t N = std::max<std::size_t>(points ? points : n, 2);
    auto sub = initial_signature(op, traj.m, samples.front().position, samples.front().velocity);
    STrajectory out{op, {}, sigma, {}, {}, 0.5 * sub.psi_prime0, 0.5 * sub.psi_second0, 0.0, false, std::nullopt, {}};
    out.states.reserve(N);
    out.time.reserve(N);
    out.denom.reserve(N);

    std::vector<double> z(K), w(K);
    for (std::size_t j = 0; j < N; ++j) {
        double target = (j + 1 == N) ? S[n - 1] : S[n - 1] * static_cast<double>(j) / static_cast<double>(N - 1);
        std::size_t i;
        double theta;
        if (j == 0) {
            i = 0;
            theta = 0.0;
        } else if (j + 1 == N) {
            i = n - 2;
            theta = 1.0;
        } else {
            auto it = std::upper_bound(S.begin(), S.end(), target);
            i = std::min<std::size_t>(static_cast<std::size_t>(it - S.begin()), n - 1) - 1;
            double h = samples[i + 1].time - samples[i].time;
            double lo = 0.0, hi = 1.0;
            for (int it2 = 0; it2 < 80 && hi - lo > 1e-16; ++it2) {
                double mid = 0.5 * (lo + hi);
                double v = Hermite(mid)(S[i], m0[i], S[i + 1], m1[i], h);
                if (v < target)
                    lo = mid;
                else
                    hi = mid;
            }
            theta = 0.5 * (lo + hi);
        }

        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        double h = b.time - a.time;
        Hermite H(theta);
        for (std::size_t k = 0; k < K; ++k) {
            double u = H(a.position[k], a.velocity[k], b.position[k], b.velocity[k], h);
            double v = H(a.velocity[k], accel[i][k], b.velocity[k], accel[i + 1][k], h);
            z[k] = op.lambda(k) * u;
            w[k] = v;
        }
        double d = oriented_denominator(op, z, w, sigma);
        out.states.push_back({target, ModeVector(z), ModeVector(w)});
        out.time.push_back(a.time + theta * h);
        out.denom.push_back(d);
        out.denom_rate.push_back(denominator_rate(op, z, w, traj.m(s0 + sigma * target), sigma));
    }
    out.gamma1_measured = measure_gamma1(out);
    return out;
}

double measure_gamma1(const STrajectory& traj, double fraction) {
    if (traj.size() < 2) return 0.0;
    const double bound = fraction * traj.states.back().s;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < traj.size(); ++i) {
        double s = traj.states[i].s;
        if (s > bound && std::isfinite(best)) break;
        best = std::min(best, 0.5 * traj.denom[i] / std::sqrt(s));
    }
    return best;
}

void write_s_trajectory_csv(std::ostream& os, const STrajectory& traj) {
    const std::size_t K = traj.op.size();
    std::vector<std::string> header{"s", "t", "d"};
    for (std::size_t k = 1; k <= K; ++k) header.push_back(fmt::format("z_{}", k));
    for (std::size_t k = 1; k <= K; ++k) header.push_back(fmt::format("w_{}", k));
    csv::write_header(os, header);
    std::vector<double> row;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        row.clear();
        row.push_back(traj.states[i].s);
        row.push_back(i < traj.time.size() ? traj.time[i] : 0.0);
        row.push_back(traj.denom[i]);
        row.insert(row.end(), traj.states[i].z.begin(), traj.states[i].z.end());
        row.insert(row.end(), traj.states[i].w.begin(), traj.states[i].w.end());
        csv::write_row(os, row);
    }
}

}  // namespace kirchhoff
