#include <doctest.h>

#include <cmath>
#include <vector>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/modulus.hpp"

using namespace kirchhoff;

namespace {

std::vector<double> dyadic_grid() {
    std::vector<double> g;
    for (int j = -20; j <= 20; ++j) g.push_back(std::ldexp(1.0, j));
    return g;
}

std::vector<ContinuityModulus> builtin_moduli() {
    return {ContinuityModulus::linear(), ContinuityModulus::holder(0.5), ContinuityModulus::holder(0.25),
            ContinuityModulus::log_lipschitz(),
            ContinuityModulus::bounded_custom({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}, {4.0, 2.0}}),
            ContinuityModulus::holder(0.5).capped(3.0)};
}

}  // namespace

TEST_CASE("lower_bound_check examples") {
    auto lin = [](double s) { return s; };
    auto r = lower_bound_check(lin, {1.0});
    CHECK(r.passed);
    CHECK(r.worst_ratio == doctest::Approx(2.0));

    CHECK(lower_bound_check([](double s) { return std::sqrt(s); }, {0.01, 1.0, 100.0}).passed);

    auto sq = lower_bound_check([](double s) { return s * s; }, {0.1});
    CHECK_FALSE(sq.passed);
    CHECK(sq.worst_ratio == doctest::Approx(0.01 * 1.1 / 0.1));
}

TEST_CASE("estimate_L examples") {
    auto id = [](double s) { return s; };
    auto sq = [](double s) { return std::sqrt(s); };
    CHECK(estimate_L(id, id, {{0.0, 1.0}, {2.0, 5.0}, {0.5, 0.25}}) == doctest::Approx(1.0));
    CHECK(estimate_L(sq, sq, {{0.0, 1.0}, {0.0, 4.0}, {0.0, 0.01}}) == doctest::Approx(1.0));
    CHECK(estimate_L([](double) { return 3.0; }, sq, {{0.0, 1.0}, {1.0, 4.0}}) == 0.0);
}

TEST_CASE("estimate_L errors") {
    auto id = [](double s) { return s; };
    CHECK_THROWS_AS(estimate_L(id, [](double) { return 0.0; }, {{0.0, 1.0}}), DegenerateModulusError);
    CHECK_THROWS_AS(estimate_L(id, id, {{1.0, 1.0}}), ParameterError);
}

TEST_CASE("hypothesis examples") {
    auto grid = default_hypothesis_grid();
    for (double a : {0.25, 0.5, 0.75}) {
        auto w = ContinuityModulus::holder(a);
        auto r = check_hyperbolicity_hypothesis(w, WeightPhi::power(1.0 - a), Hyperbolicity::strict, grid);
        CHECK(r.satisfied);
        CHECK(r.lambda_estimate == doctest::Approx(1.0).epsilon(1e-12));
    }
    auto lin = ContinuityModulus::linear();
    auto s = check_hyperbolicity_hypothesis(lin, WeightPhi::identity(), Hyperbolicity::strict, grid);
    // sigma * (1/sigma) / sigma = 1/sigma, largest at the smallest grid point
    CHECK(s.lambda_estimate == doctest::Approx(1.0 / grid.front()).epsilon(1e-12));

    auto w = check_hyperbolicity_hypothesis(lin, WeightPhi::power(2.0 / 3.0), Hyperbolicity::weak, grid);
    CHECK(w.lambda_estimate == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("comparison_bound_check examples") {
    std::vector<double> t, zero, one, y1, y2;
    for (int i = 0; i <= 2000; ++i) {
        double ti = 2.0 * i / 2000;
        t.push_back(ti);
        zero.push_back(0.0);
        one.push_back(1.0);
        y1.push_back(ti);
        y2.push_back(ti * std::exp(ti));
    }
    auto r0 = comparison_bound_check(t, zero, zero, one);
    CHECK(r0.verdict == Verdict::pass);
    CHECK(r0.margin == doctest::Approx(0.0));
    CHECK(comparison_bound_check(t, y1, zero, one).verdict == Verdict::pass);
    auto re = comparison_bound_check(t, y2, one, one);
    CHECK(re.verdict == Verdict::pass);
    CHECK(std::abs(re.margin) < 1e-8);
    std::vector<double> big = y1;
    for (auto& v : big) v *= 1.5;
    CHECK(comparison_bound_check(t, big, zero, one).verdict == Verdict::fail);
    std::vector<double> inf = one;
    inf[5] = INFINITY;
    CHECK(comparison_bound_check(t, y1, zero, inf).verdict == Verdict::inconclusive);
}

TEST_CASE("property: built-in moduli pass both checks on the dyadic grid") {
    auto grid = dyadic_grid();
    for (const auto& w : builtin_moduli()) {
        CAPTURE(w.describe());
        auto f = [&](double s) { return w(s); };
        CHECK(lower_bound_check(f, grid).passed);
        CHECK(subadditivity_check(f, grid).passed);
    }
}

TEST_CASE("property: estimate_L monotone under refinement") {
    auto m = Nonlinearity::power(1.0, 0.5);
    auto w = ContinuityModulus::holder(0.75);
    auto mf = [&](double s) { return m(s); };
    auto wf = [&](double s) { return w(s); };
    std::vector<std::pair<double, double>> pairs;
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        double a = std::fmod(0.37 * i, 3.0);
        pairs.emplace_back(a, a + std::ldexp(1.0, -(i % 30)));
        double L = estimate_L(mf, wf, pairs);
        CHECK(L >= prev);
        prev = L;
    }
}

TEST_CASE("property: log-Lipschitz modulus with log weight has finite Lambda") {
    auto r = check_hyperbolicity_hypothesis(ContinuityModulus::log_lipschitz(), WeightPhi::logarithmic(),
                                            Hyperbolicity::strict, default_hypothesis_grid());
    CHECK(r.satisfied);
    CHECK(std::isfinite(r.lambda_estimate));
    CHECK(r.lambda_estimate <= 1.0 + 1e-12);
}

TEST_CASE("nonlinearity primitives") {
    auto m = Nonlinearity::power(1.0, 0.5);
    CHECK(m.primitive(4.0) == doctest::Approx(2.0 / 3.0 * 8.0).epsilon(1e-12));
    auto t = Nonlinearity::table({{0.0, 1.0}, {1.0, 3.0}});
    CHECK(t.primitive(1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(t(0.5) == doctest::Approx(2.0));
}
