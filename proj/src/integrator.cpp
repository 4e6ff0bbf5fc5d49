#include "kirchhoff/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "kirchhoff/csv.hpp"
#include "kirchhoff/errors.hpp"

namespace kirchhoff {

std::string to_string(Scheme s) { return s == Scheme::stormer_verlet ? "verlet" : "rk4"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "verlet" || name == "stormer_verlet") return Scheme::stormer_verlet;
    if (name == "rk4") return Scheme::rk4;
    throw ParameterError("unknown integration scheme '" + name + "'");
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(t_end >= dt)) throw ParameterError("t_end must be at least dt");
    if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
}

std::size_t IntegratorConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

namespace {

// Raw-vector kernel; ModeVector is only built for stored samples.
class Flow {
public:
    Flow(const SpectralOperator& op, const Nonlinearity& m) : m_(m), lambda2_(op.size()) {
        for (std::size_t k = 0; k < op.size(); ++k) lambda2_[k] = op.lambda(k) * op.lambda(k);
    }

    std::size_t size() const { return lambda2_.size(); }

    double stiffness(const std::vector<double>& u) const {
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) s += lambda2_[k] * u[k] * u[k];
        double c = m_(s);
        if (c < 0.0) throw ModelError(fmt::format("m({}) = {} is negative", s, c));
        return c;
    }

    void accel(const std::vector<double>& u, std::vector<double>& a) const {
        double c = stiffness(u);
        for (std::size_t k = 0; k < u.size(); ++k) a[k] = -c * lambda2_[k] * u[k];
    }

private:
    const Nonlinearity& m_;
    std::vector<double> lambda2_;
};

bool finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Stepper {
public:
    Stepper(const Flow& flow, Scheme scheme, double dt)
        : flow_(flow), scheme_(scheme), dt_(dt), a_(flow.size()), k_(8, std::vector<double>(flow.size())),
          tmp_u_(flow.size()), tmp_v_(flow.size()) {}

    void prime(const std::vector<double>& u) {
        if (scheme_ == Scheme::stormer_verlet) flow_.accel(u, a_);
    }

    void step(std::vector<double>& u, std::vector<double>& v) {
        if (scheme_ == Scheme::stormer_verlet)
            verlet(u, v);
        else
            rk4(u, v);
    }

private:
    void verlet(std::vector<double>& u, std::vector<double>& v) {
        const std::size_t n = u.size();
        const double h = dt_;
        for (std::size_t k = 0; k < n; ++k) v[k] += 0.5 * h * a_[k];
        for (std::size_t k = 0; k < n; ++k) u[k] += h * v[k];
        flow_.accel(u, a_);
        for (std::size_t k = 0; k < n; ++k) v[k] += 0.5 * h * a_[k];
    }

    void rk4(std::vector<double>& u, std::vector<double>& v) {
        const std::size_t n = u.size();
        const double h = dt_;
        auto& ku1 = k_[0]; auto& kv1 = k_[1];
        auto& ku2 = k_[2]; auto& kv2 = k_[3];
        auto& ku3 = k_[4]; auto& kv3 = k_[5];
        auto& ku4 = k_[6]; auto& kv4 = k_[7];

        ku1 = v;
        flow_.accel(u, kv1);
        for (std::size_t k = 0; k < n; ++k) {
            tmp_u_[k] = u[k] + 0.5 * h * ku1[k];
            tmp_v_[k] = v[k] + 0.5 * h * kv1[k];
        }
        ku2 = tmp_v_;
        flow_.accel(tmp_u_, kv2);
        for (std::size_t k = 0; k < n; ++k) {
            tmp_u_[k] = u[k] + 0.5 * h * ku2[k];
            tmp_v_[k] = v[k] + 0.5 * h * kv2[k];
        }
        ku3 = tmp_v_;
        flow_.accel(tmp_u_, kv3);
        for (std::size_t k = 0; k < n; ++k) {
            tmp_u_[k] = u[k] + h * ku3[k];
            tmp_v_[k] = v[k] + h * kv3[k];
        }
        ku4 = tmp_v_;
        flow_.accel(tmp_u_, kv4);
        for (std::size_t k = 0; k < n; ++k) {
            u[k] += h / 6.0 * (ku1[k] + 2.0 * ku2[k] + 2.0 * ku3[k] + ku4[k]);
            v[k] += h / 6.0 * (kv1[k] + 2.0 * kv2[k] + 2.0 * kv3[k] + kv4[k]);
        }
    }

    const Flow& flow_;
    Scheme scheme_;
    double dt_;
    std::vector<double> a_;
    std::vector<std::vector<double>> k_;
    std::vector<double> tmp_u_, tmp_v_;
};

}  // namespace

IntegrationResult try_integrate(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                const ModeVector& u1, const IntegratorConfig& cfg) {
    check_dimensions(op, u0);
    check_dimensions(op, u1);
    cfg.validate();

    IntegrationResult result{Trajectory{op, m, {}, cfg.dt}, std::nullopt};
    auto& samples = result.trajectory.samples;
    const std::size_t steps = cfg.step_count();
    samples.reserve(steps / static_cast<std::size_t>(cfg.sample_stride) + 2);
    samples.emplace_back(u0, u1, 0.0);

    Flow flow(op, m);
    Stepper stepper(flow, cfg.scheme, cfg.dt);
    std::vector<double> u = u0.vector(), v = u1.vector();
    stepper.prime(u);

    for (std::size_t i = 1; i <= steps; ++i) {
        stepper.step(u, v);
        if (!finite(u) || !finite(v)) {
            result.divergence_time = static_cast<double>(i - 1) * cfg.dt;
            return result;
        }
        if (i % static_cast<std::size_t>(cfg.sample_stride) == 0 || i == steps)
            samples.emplace_back(ModeVector(u), ModeVector(v), static_cast<double>(i) * cfg.dt);
    }
    return result;
}

Trajectory integrate(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0, const ModeVector& u1,
                     const IntegratorConfig& cfg) {
    auto r = try_integrate(op, m, u0, u1, cfg);
    if (r.divergence_time) throw DivergenceError(*r.divergence_time);
    return std::move(r.trajectory);
}

double energy(const SpectralOperator& op, const Nonlinearity& m, const PhaseState& state) {
    return norm_squared(state.velocity) + m.primitive(half_power_norm_squared(op, state.position));
}

double relative_energy_drift(const Trajectory& traj) {
    if (traj.samples.empty()) return 0.0;
    double e0 = energy(traj.op, traj.m, traj.samples.front());
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, std::abs(energy(traj.op, traj.m, s) - e0));
    return e0 != 0.0 ? worst / std::abs(e0) : worst;
}

InitialSignature initial_signature(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                   const ModeVector& u1) {
    check_dimensions(op, u0);
    check_dimensions(op, u1);
    double s0 = half_power_norm_squared(op, u0);
    return {2.0 * operator_inner(op, u0, u1),
            2.0 * (half_power_norm_squared(op, u1) - m(s0) * power_norm_squared(op, u0))};
}

ModeVector acceleration(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u) {
    double c = m(half_power_norm_squared(op, u));
    ModeVector a = apply_power(op, 1.0, u);
    a *= -c;
    return a;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t K = traj.op.size();
    std::vector<std::string> header{"t"};
    for (std::size_t k = 1; k <= K; ++k) header.push_back(fmt::format("u_{}", k));
    for (std::size_t k = 1; k <= K; ++k) header.push_back(fmt::format("v_{}", k));
    header.push_back("s");
    header.push_back("energy");
    csv::write_header(os, header);

    std::vector<double> row;
    row.reserve(2 * K + 3);
    for (const auto& st : traj.samples) {
        row.clear();
        row.push_back(st.time);
        row.insert(row.end(), st.position.begin(), st.position.end());
        row.insert(row.end(), st.velocity.begin(), st.velocity.end());
        row.push_back(half_power_norm_squared(traj.op, st.position));
        row.push_back(energy(traj.op, traj.m, st));
        csv::write_row(os, row);
    }
}

}  // namespace kirchhoff
