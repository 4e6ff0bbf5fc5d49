#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kirchhoff/lab.hpp"

using namespace kirchhoff;

namespace {

IntegratorConfig config(Scheme scheme, double dt, double t_end, int stride = 1) {
    IntegratorConfig c;
    c.scheme = scheme;
    c.dt = dt;
    c.t_end = t_end;
    c.sample_stride = stride;
    return c;
}

struct PerturbedPair {
    STrajectory first, second;
    Coefficient c;
};

PerturbedPair perturbed_pair(double delta) {
    SpectralOperator op({1.0, 2.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    ModeVector u0({1.0, 0.5}), u1({1.0, 1.0});
    ModeVector u1p({1.0 + delta, 1.0});
    auto tr = integrate(op, m, u0, u1, config(Scheme::rk4, 1e-4, 2.0));
    auto win = monotone_window(tr);
    double s0 = half_power_norm_squared(op, u0);
    int o = win.orientation;
    Coefficient c = [m, s0, o](double s) { return m(s0 + o * s); };
    SIntegratorConfig scfg;
    scfg.ds = 2.5e-4;
    auto z0 = apply_power(op, 0.5, u0);
    auto a = integrate_s(op, c, startup_params(op, m, u0, u1), z0, u1, 0.8 * win.s_max, scfg);
    auto b = integrate_s(op, c, startup_params(op, m, u0, u1p), z0, u1p, 0.8 * win.s_max, scfg);
    return {a, b, c};
}

}  // namespace

TEST_CASE("evaluate_criterion examples") {
    auto r1 = evaluate_criterion(SpectralOperator({2.0}), Nonlinearity::constant(1.0), ModeVector({1.0}),
                                 ModeVector({1.0}));
    CHECK(r1.D1 == 4.0);
    CHECK(r1.nondegenerate);
    auto r2 = evaluate_criterion(SpectralOperator({1.0, 1.0}), Nonlinearity::affine(0.0, 1.0), ModeVector({1.0, 0.0}),
                                 ModeVector({0.0, 1.0}));
    CHECK(r2.D1 == 0.0);
    CHECK(r2.D2 == 0.0);
    CHECK_FALSE(r2.nondegenerate);
    auto r3 = evaluate_criterion(SpectralOperator({1.0}), Nonlinearity::constant(1.0), ModeVector({1.0}),
                                 ModeVector({0.0}));
    CHECK(r3.D1 == 0.0);
    CHECK(r3.D2 == -1.0);
    CHECK(r3.nondegenerate);
    CHECK(r3.tol == default_criterion_tolerance(SpectralOperator({1.0}), ModeVector({1.0}), ModeVector({0.0})));
}

TEST_CASE("property: criterion invariant under u1 -> -u1") {
    SpectralOperator op({0.5, 1.0, 2.5, 3.0});
    auto m = Nonlinearity::power(2.0, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(4), b(4);
        for (int k = 0; k < 4; ++k) {
            a[k] = std::sin(1.3 * trial + k);
            b[k] = std::cos(0.7 * trial * k + 0.2);
        }
        ModeVector u0(a), u1(b);
        auto p = evaluate_criterion(op, m, u0, u1);
        auto q = evaluate_criterion(op, m, u0, -1.0 * u1);
        CHECK(std::abs(p.D1) == std::abs(q.D1));
        CHECK(p.D2 == q.D2);
        CHECK(p.nondegenerate == q.nondegenerate);
    }
}

TEST_CASE("scan_degeneracy examples") {
    SpectralOperator op1({1.0});
    auto one = Nonlinearity::constant(1.0);
    auto lin = integrate(op1, one, ModeVector({1.0}), ModeVector({0.0}), config(Scheme::rk4, 1e-3, 10.0));
    CHECK(scan_degeneracy(lin, 1e-9).empty());

    SpectralOperator op2({1.0, 1.0});
    auto rot = integrate(op2, one, ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}), config(Scheme::rk4, 1e-3, 6.3));
    auto ev = scan_degeneracy(rot, 1e-9);
    CHECK(ev.size() >= rot.samples.size());
    CHECK(ev.front().t_star == 0.0);
    for (const auto& e : ev) CHECK(std::abs(e.D1_at) + std::abs(e.D2_at) <= 1e-9);

    auto eig = integrate(op2, Nonlinearity::affine(0.0, 1.0), ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}),
                         config(Scheme::rk4, 1e-3, 1.0));
    auto ev2 = scan_degeneracy(eig, 1e-9);
    REQUIRE_FALSE(ev2.empty());
    CHECK(ev2.front().t_star == 0.0);
}

TEST_CASE("classify_eigenpair examples") {
    SpectralOperator op2({1.0, 1.0});
    auto c = classify_eigenpair(op2, ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}), Nonlinearity::affine(0.0, 1.0));
    CHECK(c.applicable);
    CHECK(c.as1);
    CHECK(c.as2);
    CHECK(c.as3 == "unknown");
    SpectralOperator op3({1.0, 2.0});
    auto d = classify_eigenpair(op3, ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}), Nonlinearity::constant(1.0));
    CHECK_FALSE(d.applicable);
    auto e = classify_eigenpair(SpectralOperator({3.0}), ModeVector({1.0}), ModeVector({1.0}), Nonlinearity::constant(1.0));
    CHECK(e.applicable);
    CHECK_FALSE(e.as1);
}

TEST_CASE("cross_solver_agreement examples") {
    SpectralOperator op({1.0, 2.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    ModeVector u0({1.0, 0.5}), u1({0.3, 0.0});
    auto ref = integrate(op, m, u0, u1, config(Scheme::stormer_verlet, 1e-4, 5.0));
    double tw = monotone_window(ref).t_end;
    auto a = cross_solver_agreement(op, m, u0, u1, config(Scheme::stormer_verlet, 1e-4, 5.0, 10),
                                    config(Scheme::rk4, 1e-3, 5.0), tw);
    CHECK(a.distance <= 1e-6);
    CHECK(a.common_samples > 1);
    CHECK_FALSE(a.partial);

    auto same = cross_solver_agreement(op, m, u0, u1, config(Scheme::rk4, 1e-3, 5.0), config(Scheme::rk4, 1e-3, 5.0));
    CHECK(same.distance == 0.0);

    SpectralOperator op1({1.0});
    auto one = Nonlinearity::constant(1.0);
    for (auto scheme : {Scheme::rk4, Scheme::stormer_verlet}) {
        auto tr = integrate(op1, one, ModeVector({1.0}), ModeVector({0.5}), config(scheme, 1e-4, 5.0, 100));
        double err = 0.0;
        for (const auto& st : tr.samples) {
            double t = st.time;
            err = std::max(err, std::abs(st.position[0] - (std::cos(t) + 0.5 * std::sin(t))) +
                                    std::abs(st.velocity[0] - (-std::sin(t) + 0.5 * std::cos(t))));
        }
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("property: agreement distance shows second-order convergence (ratio 4 within 1%)") {
    SpectralOperator op({1.0, 2.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    ModeVector u0({1.0, 0.5}), u1({0.3, 0.0});
    auto ref = integrate(op, m, u0, u1, config(Scheme::stormer_verlet, 1e-4, 5.0));
    double tw = monotone_window(ref).t_end;
    auto a = cross_solver_agreement(op, m, u0, u1, config(Scheme::stormer_verlet, 1e-4, 5.0, 10),
                                    config(Scheme::rk4, 1e-3, 5.0), tw);
    auto b = cross_solver_agreement(op, m, u0, u1, config(Scheme::stormer_verlet, 5e-5, 5.0, 20),
                                    config(Scheme::rk4, 5e-4, 5.0, 2), tw);
    CHECK(a.distance >= 4.0 * b.distance * 0.99);
}

TEST_CASE("energy_trace of identical trajectories vanishes") {
    auto p = perturbed_pair(0.0);
    MollifiedCoefficient ce(p.c, 0.5, Hyperbolicity::strict);
    auto tr = energy_trace(p.first, p.first, p.c, ce, 1, WeightPhi::constant(1.0));
    CHECK(tr.max_E() == 0.0);
    CHECK(tr.max_residual() <= 0.0);
}

TEST_CASE("energy_trace on a perturbed pair") {
    const double delta = 1e-6;
    auto p = perturbed_pair(delta);
    for (std::size_t k : {0u, 1u}) {
        double lambda = k == 0 ? 1.0 : 2.0;
        double eps = epsilon_for_mode(lambda, [](double s) { return s; }, Hyperbolicity::strict);
        MollifiedCoefficient ce(p.c, eps, Hyperbolicity::strict);
        auto tr = energy_trace(p.first, p.second, p.c, ce, k, WeightPhi::constant(1.0));
        REQUIRE(tr.s.size() > 100);
        for (double e : tr.E) CHECK(e >= 0.0);
        CHECK(tr.max_residual() <= 1e-8 * tr.max_E());
        CHECK(tr.gronwall_margin() >= 0.0);
        CHECK(tr.max_E() <= 100.0 * delta * delta);
        std::ostringstream os;
        write_energy_trace_csv(os, tr);
        CHECK(os.str().rfind("s,E,I1,I2,I3,eta1,eta2,residual\n", 0) == 0);
    }
}

TEST_CASE("iteration_bound_check examples") {
    std::vector<double> t, zero, lin, root;
    for (int i = 0; i <= 4000; ++i) {
        double ti = i / 4000.0;
        t.push_back(ti);
        zero.push_back(0.0);
        lin.push_back(ti);
        root.push_back(std::sqrt(ti));
    }
    auto z = iteration_bound_check(t, zero, 1.0);
    CHECK(z.envelope_ok);
    CHECK(z.vanishes);

    auto once = apply_iteration_operator(t, lin, 2.0);
    for (std::size_t i = 0; i < t.size(); i += 400)
        CHECK(std::abs(once[i] - 2.0 * std::pow(t[i], 1.5) / 3.0) <= 1e-9);

    auto r = iteration_bound_check(t, root, 1.0, 12);
    CHECK(r.envelope_ok);
    CHECK(r.envelope_ratio.size() == 12);
    for (double q : r.envelope_ratio) CHECK(q <= 1.0 + 1e-9);
    CHECK_FALSE(r.subsolution);
}
