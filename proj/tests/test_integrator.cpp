#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/integrator.hpp"

using namespace kirchhoff;

namespace {

IntegratorConfig cfg(Scheme scheme, double dt, double t_end, int stride = 1) {
    IntegratorConfig c;
    c.scheme = scheme;
    c.dt = dt;
    c.t_end = t_end;
    c.sample_stride = stride;
    return c;
}

// u'' + (1 + u^2) u = 0, u(0) = 1, u'(0) = 0 has E = 3/2 and
// 1.5 - u^2 - u^4/2 = (1 - u^2)(1.5 + u^2/2); with u = sin(theta) the quarter period is
// int_0^{pi/2} dtheta / sqrt(1.5 + sin^2(theta)/2), a smooth periodic integrand.
double quarter_period_oracle() {
    const int n = 4096;
    double h = std::numbers::pi / 2 / n, acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = std::sin((i + 0.5) * h);
        acc += 1.0 / std::sqrt(1.5 + 0.5 * s * s);
    }
    return acc * h;
}

double first_zero(const Trajectory& tr) {
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        double a = tr.samples[i - 1].position[0], b = tr.samples[i].position[0];
        if (a > 0.0 && b <= 0.0) {
            double ta = tr.samples[i - 1].time, tb = tr.samples[i].time;
            return ta + (tb - ta) * a / (a - b);
        }
    }
    return NAN;
}

}  // namespace

TEST_CASE("linear closed forms") {
    SpectralOperator op({1.0});
    auto tr = integrate(op, Nonlinearity::constant(1.0), ModeVector({1.0}), ModeVector({0.0}),
                        cfg(Scheme::stormer_verlet, 1e-3, std::numbers::pi));
    CHECK(tr.samples.front().time == 0.0);
    CHECK(tr.samples.back().time == doctest::Approx(std::numbers::pi).epsilon(1e-3));
    double tl = tr.samples.back().time;
    CHECK(std::abs(tr.samples.back().position[0] - std::cos(tl)) <= 1e-6);

    for (auto scheme : {Scheme::stormer_verlet, Scheme::rk4}) {
        auto t2 = integrate(op, Nonlinearity::constant(4.0), ModeVector({0.0}), ModeVector({1.0}),
                            cfg(scheme, 1e-3, 2.0, 10));
        for (const auto& st : t2.samples) {
            CHECK(std::abs(st.position[0] - std::sin(2.0 * st.time) / 2.0) <= 1e-6);
            CHECK(std::abs(st.velocity[0] - std::cos(2.0 * st.time)) <= 1e-6);
        }
    }
}

TEST_CASE("nonlinear period matches the quadrature oracle") {
    SpectralOperator op({1.0});
    double q = quarter_period_oracle();
    for (auto scheme : {Scheme::rk4, Scheme::stormer_verlet}) {
        double dt = scheme == Scheme::rk4 ? 1e-3 : 1e-4;
        auto tr = integrate(op, Nonlinearity::affine(1.0, 1.0), ModeVector({1.0}), ModeVector({0.0}),
                            cfg(scheme, dt, 2.0));
        CHECK(std::abs(first_zero(tr) - q) / q <= 1e-5);
    }
}

TEST_CASE("energy examples") {
    SpectralOperator op({1.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    CHECK(energy(op, m, PhaseState(ModeVector({1.0}), ModeVector({0.0}), 0.0)) == doctest::Approx(1.5));
    CHECK(energy(op, m, PhaseState(ModeVector({0.0}), ModeVector({0.0}), 0.0)) == 0.0);
}

TEST_CASE("initial_signature examples") {
    SpectralOperator op1({1.0});
    auto one = Nonlinearity::constant(1.0);
    auto a = initial_signature(op1, one, ModeVector({1.0}), ModeVector({1.0}));
    CHECK(a.psi_prime0 == 2.0);
    CHECK(a.psi_second0 == 0.0);
    auto b = initial_signature(op1, one, ModeVector({1.0}), ModeVector({0.0}));
    CHECK(b.psi_prime0 == 0.0);
    CHECK(b.psi_second0 == -2.0);
    SpectralOperator op2({1.0, 1.0});
    auto c = initial_signature(op2, Nonlinearity::affine(0.0, 1.0), ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}));
    CHECK(c.psi_prime0 == 0.0);
    CHECK(c.psi_second0 == 0.0);
}

TEST_CASE("errors") {
    SpectralOperator op({1.0});
    CHECK_THROWS_AS(integrate(op, Nonlinearity::constant(-1.0), ModeVector({1.0}), ModeVector({0.0}),
                              cfg(Scheme::rk4, 1e-3, 1.0)),
                    ModelError);
    CHECK_THROWS_AS(integrate(op, Nonlinearity::constant(1.0), ModeVector({1.0, 0.0}), ModeVector({0.0}),
                              cfg(Scheme::rk4, 1e-3, 1.0)),
                    DimensionError);
    // u'' = -(u^2)^2 u with large data blows up under a coarse explicit step
    auto r = try_integrate(op, Nonlinearity::power(1.0, 2.0), ModeVector({30.0}), ModeVector({0.0}),
                           cfg(Scheme::rk4, 0.5, 50.0));
    REQUIRE(r.divergence_time.has_value());
    CHECK(r.trajectory.samples.back().position.all_finite());
    CHECK_THROWS_AS(integrate(op, Nonlinearity::power(1.0, 2.0), ModeVector({30.0}), ModeVector({0.0}),
                              cfg(Scheme::rk4, 0.5, 50.0)),
                    DivergenceError);
}

TEST_CASE("property: energy drift on smooth scenarios") {
    for (std::size_t K : {1u, 4u, 16u}) {
        auto op = SpectralOperator::power_law(K, 1.0);
        std::vector<double> a(K), b(K);
        for (std::size_t k = 0; k < K; ++k) {
            a[k] = std::exp(-double(k + 1));
            b[k] = 0.5 * a[k];
        }
        for (auto m : {Nonlinearity::constant(1.0), Nonlinearity::affine(1.0, 1.0), Nonlinearity::affine(0.5, 2.0)}) {
            auto tr = integrate(op, m, ModeVector(a), ModeVector(b), cfg(Scheme::stormer_verlet, 1e-4, 10.0, 100));
            CAPTURE(K);
            CHECK(relative_energy_drift(tr) <= 1e-8);
        }
    }
}

TEST_CASE("property: time reversal") {
    SpectralOperator op({1.0, 2.0, 3.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    ModeVector u0({1.0, 0.5, 0.1}), u1({0.3, 0.0, -0.2});
    auto fwd = integrate(op, m, u0, u1, cfg(Scheme::stormer_verlet, 1e-4, 3.0, 1000));
    const auto& end = fwd.samples.back();
    auto back = integrate(op, m, end.position, -1.0 * end.velocity, cfg(Scheme::stormer_verlet, 1e-4, end.time, 1000));
    const auto& fin = back.samples.back();
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(fin.position[k] - u0[k]) <= 1e-6);
        CHECK(std::abs(fin.velocity[k] + u1[k]) <= 1e-6);
    }
}

TEST_CASE("property: psi'(0) from finite differences") {
    SpectralOperator op({1.0, 2.0});
    auto m = Nonlinearity::affine(1.0, 1.0);
    ModeVector u0({1.0, 0.5}), u1({0.3, -0.4});
    auto sig = initial_signature(op, m, u0, u1);
    for (double dt : {1e-3, 5e-4}) {
        auto tr = integrate(op, m, u0, u1, cfg(Scheme::rk4, dt, 4 * dt));
        auto psi = [&](std::size_t i) {
            return half_power_norm_squared(op, tr.samples[i].position) - half_power_norm_squared(op, u0);
        };
        // second-order one-sided difference
        double d = (-3.0 * psi(0) + 4.0 * psi(1) - psi(2)) / (2.0 * dt);
        CHECK(std::abs(d - sig.psi_prime0) <= 10.0 * dt * dt * (1.0 + std::abs(sig.psi_second0)));
    }
}

TEST_CASE("trajectory csv header and reproducibility") {
    SpectralOperator op({1.0, 2.0});
    auto tr = integrate(op, Nonlinearity::constant(1.0), ModeVector({1.0, 0.0}), ModeVector({0.0, 1.0}),
                        cfg(Scheme::rk4, 1e-2, 0.1));
    std::ostringstream a, b;
    write_trajectory_csv(a, tr);
    write_trajectory_csv(b, tr);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("t,u_1,u_2,v_1,v_2,s,energy\n", 0) == 0);
}
