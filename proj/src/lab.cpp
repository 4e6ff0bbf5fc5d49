#include "kirchhoff/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "kirchhoff/csv.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

double default_criterion_tolerance(const SpectralOperator& op, const ModeVector& u0, const ModeVector& u1) {
    return 1e-12 * (1.0 + std::sqrt(power_norm_squared(op, u0)) * std::sqrt(norm_squared(u1)));
}

CriterionReport evaluate_criterion(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                   const ModeVector& u1, std::optional<double> tol) {
    auto sig = initial_signature(op, m, u0, u1);
    CriterionReport r;
    r.D1 = 0.5 * sig.psi_prime0;
    r.D2 = 0.5 * sig.psi_second0;
    r.tol = tol.value_or(default_criterion_tolerance(op, u0, u1));
    if (!(r.tol >= 0.0)) throw ParameterError("criterion tolerance must be nonnegative");
    r.nondegenerate = std::abs(r.D1) + std::abs(r.D2) > r.tol;
    return r;
}

namespace {

struct DPair {
    double d1, d2;
};

DPair degeneracy_quantities(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u,
                            const ModeVector& v) {
    auto sig = initial_signature(op, m, u, v);
    return {0.5 * sig.psi_prime0, 0.5 * sig.psi_second0};
}

double hermite(double p0, double m0, double p1, double m1, double h, double t) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * m1;
}

// State at a fractional position between two samples, cubic Hermite using u' = v and v' = -m A u.
PhaseState interpolate_state(const Trajectory& traj, std::size_t i, double theta) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    ModeVector aa = acceleration(traj.op, traj.m, a.position);
    ModeVector ab = acceleration(traj.op, traj.m, b.position);
    double h = b.time - a.time;
    const std::size_t K = traj.op.size();
    std::vector<double> u(K), v(K);
    for (std::size_t k = 0; k < K; ++k) {
        u[k] = hermite(a.position[k], a.velocity[k], b.position[k], b.velocity[k], h, theta);
        v[k] = hermite(a.velocity[k], aa[k], b.velocity[k], ab[k], h, theta);
    }
    return PhaseState(ModeVector(std::move(u)), ModeVector(std::move(v)), a.time + theta * h);
}

}  // namespace

std::vector<DegeneracyEvent> scan_degeneracy(const Trajectory& traj, double tol) {
    const auto& samples = traj.samples;
    const std::size_t n = samples.size();
    std::vector<DPair> q(n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = degeneracy_quantities(traj.op, traj.m, samples[i].position, samples[i].velocity);
        f[i] = std::abs(q[i].d1) + std::abs(q[i].d2);
    }

    std::vector<DegeneracyEvent> events;
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] <= tol) {
            events.push_back({samples[i].time, q[i].d1, q[i].d2});
            continue;
        }
        if (i == 0 || i + 1 == n || !(f[i] < f[i - 1] && f[i] <= f[i + 1])) continue;

        // golden-section search on [t_{i-1}, t_{i+1}], parametrized by x in [0, 2]
        auto eval = [&](double x) {
            std::size_t cell = x < 1.0 ? i - 1 : i;
            double theta = x < 1.0 ? x : x - 1.0;
            auto st = interpolate_state(traj, cell, theta);
            auto dq = degeneracy_quantities(traj.op, traj.m, st.position, st.velocity);
            return std::pair{std::abs(dq.d1) + std::abs(dq.d2), DegeneracyEvent{st.time, dq.d1, dq.d2}};
        };
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = 0.0, hi = 2.0;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        auto f1 = eval(x1), f2 = eval(x2);
        for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
            if (f1.first < f2.first) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = eval(x2);
            }
        }
        const auto& best = f1.first < f2.first ? f1 : f2;
        if (best.first <= tol) events.push_back(best.second);
    }
    return events;
}

EigenpairClassification classify_eigenpair(const SpectralOperator& op, const ModeVector& u0, const ModeVector& u1,
                                           const Nonlinearity& m, std::optional<double> tol) {
    check_dimensions(op, u0);
    check_dimensions(op, u1);
    EigenpairClassification out;
    std::optional<double> lambda;
    for (std::size_t k = 0; k < op.size(); ++k) {
        if (u0[k] == 0.0 && u1[k] == 0.0) continue;
        if (lambda && *lambda != op.lambda(k)) {
            out.reason = fmt::format("data touch eigenvalues {} and {}", *lambda, op.lambda(k));
            return out;
        }
        lambda = op.lambda(k);
    }
    auto crit = evaluate_criterion(op, m, u0, u1, tol);
    out.applicable = true;
    out.eigenvalue = lambda;
    out.as1 = std::abs(crit.D1) <= crit.tol;
    out.as2 = std::abs(crit.D2) <= crit.tol;
    out.as3 = "unknown";
    out.reason = "AS3 is an unspecified integrability condition and is not evaluated";
    return out;
}

AgreementReport compare_trajectories(const Trajectory& a, const Trajectory& b, std::optional<double> t_window) {
    AgreementReport r;
    const double match = 1e-6 * std::min(a.dt > 0 ? a.dt : 1.0, b.dt > 0 ? b.dt : 1.0);
    std::size_t j = 0;
    for (const auto& sa : a.samples) {
        if (t_window && sa.time > *t_window + match) break;
        while (j < b.samples.size() && b.samples[j].time < sa.time - match) ++j;
        if (j == b.samples.size()) break;
        const auto& sb = b.samples[j];
        if (std::abs(sb.time - sa.time) > match) continue;
        double du = std::sqrt(norm_squared(sa.position - sb.position));
        double dv = std::sqrt(norm_squared(sa.velocity - sb.velocity));
        r.distance = std::max(r.distance, du + dv);
        r.t_compared = sa.time;
        ++r.common_samples;
    }
    return r;
}

AgreementReport cross_solver_agreement(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                       const ModeVector& u1, const IntegratorConfig& a, const IntegratorConfig& b,
                                       std::optional<double> t_window) {
    auto ra = try_integrate(op, m, u0, u1, a);
    auto rb = try_integrate(op, m, u0, u1, b);
    auto report = compare_trajectories(ra.trajectory, rb.trajectory, t_window);
    if (ra.divergence_time || rb.divergence_time) {
        report.partial = true;
        report.divergence_time = std::min(ra.divergence_time.value_or(std::numeric_limits<double>::infinity()),
                                          rb.divergence_time.value_or(std::numeric_limits<double>::infinity()));
    }
    return report;
}

double s_trajectory_distance(const STrajectory& a, const STrajectory& b, const Coefficient& c_b) {
    if (b.size() < 2) throw ResamplingError("second s-trajectory has fewer than two states");
    const std::size_t K = b.op.size();
    auto sb = b.s_values();
    double worst = 0.0;
    std::vector<double> z(K), w(K);
    for (const auto& st : a.states) {
        if (st.s < sb.front() || st.s > sb.back()) continue;
        auto it = std::upper_bound(sb.begin(), sb.end(), st.s);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - sb.begin()), sb.size() - 1) - 1;
        const auto& p = b.states[i];
        const auto& q = b.states[i + 1];
        // Hermite in tau = sqrt(s): the square-root start is smooth there, and dz/dtau = 2 tau dz/ds
        double tp = std::sqrt(p.s), tq = std::sqrt(q.s), ht = tq - tp;
        double tt = (std::sqrt(st.s) - tp) / ht;
        auto tau_rates = [&](const SState& x, double denom, double tau) {
            std::vector<double> rz(K), rw(K);
            double scale;
            if (denom > 0.0)
                scale = 2.0 * tau / denom;
            else if (tau == 0.0 && b.oriented_beta() > 0.0)
                scale = 1.0 / std::sqrt(b.oriented_beta());
            else
                return std::optional<std::pair<std::vector<double>, std::vector<double>>>{};
            double cs = c_b(x.s);
            for (std::size_t k = 0; k < K; ++k) {
                rz[k] = scale * b.op.lambda(k) * x.w[k];
                rw[k] = -scale * cs * b.op.lambda(k) * x.z[k];
            }
            return std::optional{std::pair{rz, rw}};
        };
        auto rp = tau_rates(p, b.denom[i], tp);
        auto rq = tau_rates(q, b.denom[i + 1], tq);
        for (std::size_t k = 0; k < K; ++k) {
            if (rp && rq) {
                z[k] = hermite(p.z[k], rp->first[k], q.z[k], rq->first[k], ht, tt);
                w[k] = hermite(p.w[k], rp->second[k], q.w[k], rq->second[k], ht, tt);
            } else {
                z[k] = p.z[k] + tt * (q.z[k] - p.z[k]);
                w[k] = p.w[k] + tt * (q.w[k] - p.w[k]);
            }
        }
        double dz = 0.0, dw = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            dz += (z[k] - st.z[k]) * (z[k] - st.z[k]);
            dw += (w[k] - st.w[k]) * (w[k] - st.w[k]);
        }
        worst = std::max(worst, std::sqrt(dz) + std::sqrt(dw));
    }
    return worst;
}

// ---------------------------------------------------------------------------

double EnergyTrace::max_E() const {
    double best = E0;
    for (double e : E) best = std::max(best, e);
    return best;
}

double EnergyTrace::max_residual() const {
    double best = -std::numeric_limits<double>::infinity();
    for (double r : residual) best = std::max(best, r);
    return best;
}

double EnergyTrace::gronwall_margin() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < E.size(); ++i) best = std::min(best, gronwall[i] - E[i]);
    return best;
}

EnergyTrace energy_trace(const STrajectory& first, const STrajectory& second, const Coefficient& c,
                         const MollifiedCoefficient& c_eps, std::size_t k, const WeightPhi& phi) {
    // common prefix: either run may have been truncated by a degeneracy event
    const std::size_t n = std::min(first.size(), second.size());
    if (n < 3) throw ResamplingError("energy trace needs at least three common states");
    if (k >= first.op.size()) throw DimensionError("mode index out of range");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(first.states[i].s - second.states[i].s) > 1e-12 * (1.0 + first.states[i].s))
            throw ResamplingError(fmt::format("s-grids differ at index {}", i));

    const auto& op = first.op;
    const double lam = op.lambda(k);
    const double phi_term = phi(lam) + 1.0;

    std::vector<double> s(n), E(n), I1(n), I2(n), I3(n), J_integrand(n), d_sq_gap(n), weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = first.states[i];
        const auto& b = second.states[i];
        s[i] = a.s;
        ModeVector x = a.z - b.z;
        ModeVector y = a.w - b.w;
        double xk = x[k], yk = y[k];
        double ce = c_eps(s[i]), cc = c(s[i]), dce = c_eps.derivative(s[i]);
        double d1 = first.denom[i], d2 = second.denom[i];
        E[i] = yk * yk + ce * xk * xk;
        I1[i] = dce * xk * xk;
        I2[i] = (d1 > 0.0) ? 2.0 * (ce - cc) * lam * xk * yk / d1 : 0.0;
        I3[i] = (d1 > 0.0 && d2 > 0.0) ? 2.0 * lam * (1.0 / d1 - 1.0 / d2) * (ce * xk * b.w[k] - cc * yk * b.z[k]) : 0.0;
        J_integrand[i] = std::sqrt(half_power_norm_squared(op, x)) + std::sqrt(half_power_norm_squared(op, y));
        d_sq_gap[i] = std::abs(d1 * d1 - d2 * d2);
        weight[i] = lam * lam * (b.w[k] * b.w[k] + b.z[k] * b.z[k]);
    }

    auto J = quadrature::cumulative_trapezoid(s, J_integrand);
    double gamma11 = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (J[i] > 0.0)
            gamma11 = std::max(gamma11, d_sq_gap[i] / J[i]);
        else if (d_sq_gap[i] > 0.0)
            gamma11 = std::numeric_limits<double>::infinity();
    }

    EnergyTrace tr;
    tr.k = k;
    tr.lambda_k = lam;
    tr.epsilon_k = c_eps.epsilon();
    tr.schedule = c_eps.mode();
    tr.E0 = E[0];
    tr.gamma11 = gamma11;

    std::vector<double> psi12(n), dE(n, 0.0), B(n, 0.0), source(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) psi12[i] = gamma11 * J[i];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        dE[i] = (E[i + 1] - E[i - 1]) / (s[i + 1] - s[i - 1]);
        double rs = std::sqrt(s[i]);
        source[i] = psi12[i] * psi12[i] / (s[i] * s[i] * rs) * weight[i];
        B[i] = phi_term * E[i] / rs + source[i];
    }
    double gamma = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (dE[i] <= 0.0) continue;
        gamma = B[i] > 0.0 ? std::max(gamma, dE[i] / B[i]) : std::numeric_limits<double>::infinity();
    }
    tr.gamma = gamma;

    // int_0^s eta2 with eta2 = g/sqrt(s); g(0) from psi12(s)/s -> gamma11 * J'(0)
    std::vector<double> g(n);
    double slope0 = gamma11 * J_integrand[0];
    g[0] = gamma * slope0 * slope0 * weight[0];
    for (std::size_t i = 1; i < n; ++i) g[i] = gamma * psi12[i] * psi12[i] / (s[i] * s[i]) * weight[i];
    auto eta2_integral = quadrature::cumulative_inverse_sqrt(s, g);

    for (std::size_t i = 1; i + 1 < n; ++i) {
        double rs = std::sqrt(s[i]);
        double e1 = gamma * phi_term / rs;
        double e2 = gamma * source[i];
        tr.s.push_back(s[i]);
        tr.E.push_back(E[i]);
        tr.I1.push_back(I1[i]);
        tr.I2.push_back(I2[i]);
        tr.I3.push_back(I3[i]);
        tr.dE.push_back(dE[i]);
        tr.eta1.push_back(e1);
        tr.eta2.push_back(e2);
        tr.residual.push_back(dE[i] - (e1 * E[i] + e2));
        tr.psi12.push_back(psi12[i]);
        tr.gronwall.push_back(std::exp(2.0 * gamma * phi_term * rs) * (E[0] + eta2_integral[i]));
    }
    return tr;
}

void write_energy_trace_csv(std::ostream& os, const EnergyTrace& trace) {
    csv::write_header(os, {"s", "E", "I1", "I2", "I3", "eta1", "eta2", "residual"});
    for (std::size_t i = 0; i < trace.s.size(); ++i) {
        double row[] = {trace.s[i],    trace.E[i],    trace.I1[i],   trace.I2[i],
                        trace.I3[i],   trace.eta1[i], trace.eta2[i], trace.residual[i]};
        csv::write_row(os, row);
    }
}

// ---------------------------------------------------------------------------

std::vector<double> apply_iteration_operator(const std::vector<double>& t, const std::vector<double>& y, double k) {
    if (t.size() != y.size()) throw DimensionError("iteration operator: t and y differ in length");
    if (t.empty() || t.front() != 0.0) throw ParameterError("iteration operator grid must start at t = 0");
    auto inner_integral = quadrature::cumulative_trapezoid(t, y);
    std::vector<double> g(t.size());
    g[0] = y[0];  // int_0^s y / s -> y(0)
    for (std::size_t i = 1; i < t.size(); ++i) g[i] = inner_integral[i] / t[i];
    auto out = quadrature::cumulative_inverse_sqrt(t, g);
    for (double& v : out) v *= k;
    return out;
}

IterationReport iteration_bound_check(const std::vector<double>& t, const std::vector<double>& y, double k,
                                      int iterations, double tolerance) {
    if (!(k >= 0.0)) throw ParameterError("iteration constant k must be nonnegative");
    for (double v : y)
        if (v < 0.0 || !std::isfinite(v)) throw ParameterError("iteration_bound_check needs y >= 0");
    IterationReport r;
    r.max_y = y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());

    auto phi_y = apply_iteration_operator(t, y, k);
    r.subsolution = true;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > phi_y[i] * (1.0 + 1e-12) + tolerance) r.subsolution = false;
    r.vanishes = r.subsolution && r.max_y <= tolerance;

    std::vector<double> iterate = y;
    double factor = 1.0;  // 4^n k^n / n!
    for (int n = 1; n <= iterations; ++n) {
        iterate = apply_iteration_operator(t, iterate, k);
        factor *= 4.0 * k / n;
        double ratio = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            double env = factor * r.max_y * std::pow(t[i], 0.5 * n);
            if (env > 0.0)
                ratio = std::max(ratio, iterate[i] / env);
            else if (iterate[i] > 0.0)
                ratio = std::numeric_limits<double>::infinity();
        }
        r.envelope_ratio.push_back(ratio);
        if (ratio > 1.0 + 1e-9) r.envelope_ok = false;
    }
    return r;
}

}  // namespace kirchhoff
