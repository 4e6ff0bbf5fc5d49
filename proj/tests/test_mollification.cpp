#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/mollification.hpp"

using namespace kirchhoff;

namespace {

std::vector<double> s_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(lo + (hi - lo) * i / n);
    return g;
}

std::vector<double> dyadic_eps() {
    std::vector<double> e;
    for (int j = 2; j <= 12; ++j) e.push_back(std::ldexp(1.0, -j));
    return e;
}

}  // namespace

TEST_CASE("bump profile has unit mass") {
    const auto& rho = Mollifier::standard();
    boost::math::quadrature::tanh_sinh<double> ts;
    double mass = ts.integrate([&](double x) { return rho.profile(x); }, -1.0, 1.0);
    CHECK(std::abs(mass - 1.0) <= 1e-10);
    CHECK(rho.profile(1.0) == 0.0);
    CHECK(rho.profile(-1.5) == 0.0);
    CHECK(rho.profile(0.3) == doctest::Approx(rho.profile(-0.3)));
    double sum = 0.0;
    for (double w : rho.weights()) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
}

TEST_CASE("extend_coefficient examples") {
    auto one = extend_coefficient(Nonlinearity::constant(1.0), 0.0, 1.0);
    for (double s : {-10.0, 0.0, 0.5, 1.0, 7.0}) CHECK(one(s) == 1.0);
    auto c = extend_coefficient(Nonlinearity::affine(0.0, 1.0), 1.0, 2.0);
    CHECK(c(-5.0) == 1.0);
    CHECK(c(1.0) == 2.0);
    CHECK(c(10.0) == 3.0);
    CHECK(c(0.0) == 1.0);
    CHECK(c(2.0) == 3.0);
    CHECK(c(-1e-15) == doctest::Approx(c(1e-15)));
    CHECK(c(2.0 - 1e-15) == doctest::Approx(c(2.0 + 1e-15)));
}

TEST_CASE("mollify examples") {
    auto lin = ContinuityModulus::linear();
    auto k = mollify([](double) { return 2.5; }, lin, 0.3, Hyperbolicity::strict);
    for (double s : {-1.0, 0.0, 0.7}) CHECK(k(s) == doctest::Approx(2.5).epsilon(1e-15));
    auto id = mollify([](double s) { return s; }, lin, 0.25, Hyperbolicity::strict);
    for (double s : {-1.0, 0.0, 0.7, 3.0}) CHECK(std::abs(id(s) - s) <= 1e-14);
    auto w = mollify([](double) { return 2.5; }, lin, 0.1, Hyperbolicity::weak);
    for (double s : {-1.0, 0.0, 0.7}) CHECK(w(s) == doctest::Approx(2.6).epsilon(1e-15));
    CHECK_THROWS_AS(mollify([](double) { return 1.0; }, lin, 0.0, Hyperbolicity::strict), ParameterError);
}

TEST_CASE("epsilon_for_mode examples") {
    auto lin = [](double s) { return s; };
    auto half = [](double s) { return std::sqrt(s); };
    CHECK(epsilon_for_mode(4.0, lin, Hyperbolicity::strict) == 0.25);
    CHECK(epsilon_for_mode(8.0, lin, Hyperbolicity::weak) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(epsilon_for_mode(32.0, half, Hyperbolicity::weak) ==
          doctest::Approx(std::pow(32.0, -0.8)).epsilon(1e-12));
    auto bumpy = [](double s) { return s < 0.5 ? s : 1.0 - s; };
    CHECK_THROWS_AS(epsilon_for_mode(1.1, bumpy, Hyperbolicity::weak), ScheduleError);
}

TEST_CASE("verify_mollifier_estimates examples") {
    auto lin = ContinuityModulus::linear();
    auto grid = s_grid(-1.0, 1.0, 400);
    auto flat = verify_mollifier_estimates([](double) { return 3.0; }, lin, dyadic_eps(), grid);
    CHECK(flat.gamma3 * 0x1p-12 <= 1e-15);
    CHECK(flat.gamma4 <= 1e-10);

    // |c_eps(0) - |0|| / eps = int |sigma| rho, the oracle
    const auto& rho = Mollifier::standard();
    boost::math::quadrature::tanh_sinh<double> ts;
    double first_moment = 2.0 * ts.integrate([&](double x) { return x * rho.profile(x); }, 0.0, 1.0);
    auto abs_r = verify_mollifier_estimates([](double s) { return std::abs(s); }, lin, dyadic_eps(), grid);
    CHECK(abs_r.gamma3 < 1.0);
    // the 64-node rule does not resolve the kink of |s| at 0 to full precision
    CHECK(std::abs(abs_r.gamma3 - first_moment) <= 1e-3 * first_moment);
}

TEST_CASE("property: weak minus omega(eps) equals strict") {
    auto c = [](double s) { return std::sqrt(std::abs(s)) + 0.2 * std::sin(3.0 * s); };
    std::vector<ContinuityModulus> moduli{ContinuityModulus::linear(), ContinuityModulus::holder(0.5),
                                         ContinuityModulus::log_lipschitz(),
                                         ContinuityModulus::bounded_custom({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}})};
    for (const auto& w : moduli) {
        for (double eps : dyadic_eps()) {
            auto strict = mollify(c, w, eps, Hyperbolicity::strict);
            auto weak = mollify(c, w, eps, Hyperbolicity::weak);
            CHECK(weak.lift() == w(eps));
            for (double s : {-0.3, 0.0, 0.001, 0.5})
                CHECK(weak.convolution(s) == strict(s));
        }
    }
}

TEST_CASE("property: strict c_eps stays within inf/sup of c") {
    auto c = extend_coefficient(Nonlinearity::power(1.0, 0.5), 0.0, 1.0);
    for (double eps : dyadic_eps()) {
        auto ce = mollify(c, ContinuityModulus::holder(0.5), eps, Hyperbolicity::strict);
        for (double s : s_grid(-0.5, 1.5, 200)) {
            CHECK(ce(s) >= -1e-10);
            CHECK(ce(s) <= 1.0 + 1e-10);
        }
    }
}

TEST_CASE("property: weak c_eps bounded below by omega(eps)") {
    auto c = extend_coefficient(Nonlinearity::power(1.0, 0.5), 0.0, 1.0);
    auto w = ContinuityModulus::holder(0.5);
    for (double eps : dyadic_eps()) {
        auto ce = mollify(c, w, eps, Hyperbolicity::weak);
        for (double s : s_grid(-0.5, 1.5, 100)) CHECK(ce(s) >= w(eps));
    }
}

TEST_CASE("property: gamma3 and gamma4 stay bounded across dyadic eps") {
    std::vector<double> grid{0.0};
    for (int j = 0; j <= 768; ++j) {
        grid.push_back(std::exp2(-j / 32.0));
        grid.push_back(-std::exp2(-j / 32.0));
    }
    auto c = [](double s) { return std::sqrt(std::abs(s)); };
    auto r = verify_mollifier_estimates(c, ContinuityModulus::holder(0.5), dyadic_eps(), grid);
    for (std::size_t i = 1; i < r.sweep.size(); ++i) {
        CHECK(r.sweep[i].gamma3 <= 2.0 * r.sweep[i - 1].gamma3);
        CHECK(r.sweep[i].gamma4 <= 2.0 * r.sweep[i - 1].gamma4);
        CHECK(r.sweep[i - 1].gamma3 <= 2.0 * r.sweep[i].gamma3);
        CHECK(r.sweep[i - 1].gamma4 <= 2.0 * r.sweep[i].gamma4);
    }
    CHECK(std::isfinite(r.gamma3));
    CHECK(std::isfinite(r.gamma4));
}
