#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/runner.hpp"
#include "kirchhoff/scenario.hpp"

using namespace kirchhoff;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json linear_config() {
    return json::parse(R"({
        "study": "simulate",
        "operator": {"eigenvalues": [1]},
        "nonlinearity": {"kind": "constant", "value": 1},
        "initial": {"u0": [1], "u1": [0]},
        "integrator": {"scheme": "verlet", "dt": 1e-4, "t_end": 10, "sample_stride": 100}
    })");
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / "kirchhoff_tests" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_in(const json& cfg, const std::string& name) {
    RunOptions opt;
    opt.out = scratch(name);
    return run_config(cfg, fs::path(KIRCHHOFF_SOURCE_DIR) / "tools" / "scenarios", opt);
}

}  // namespace

TEST_CASE("parse a full scenario") {
    auto cfg = json::parse(R"({
        "study": "reparam",
        "name": "demo",
        "operator": {"rule": {"count": 3, "power": 1}},
        "nonlinearity": {"kind": "power", "coefficient": 2, "exponent": 0.5},
        "modulus": {"kind": "holder", "beta": 0.5},
        "phi": {"kind": "power", "exponent": 0.5},
        "initial": {"u0": [1, 0, 0], "u1": [0, 1, 0]},
        "integrator": {"scheme": "rk4", "dt": 1e-3, "t_end": 2},
        "reparam": {"ds": 1e-3, "points": 50},
        "mollifier": {"mode": "weak", "eps": [0.5, 0.25], "s_grid": {"lo": -1, "hi": 1, "points": 11}},
        "perturbation": {"delta": 1e-3, "mode": 2, "seed": 5}
    })");
    auto sc = parse_scenario(cfg);
    CHECK(sc.study == StudyKind::reparam);
    CHECK(sc.op.size() == 3);
    CHECK(sc.op.lambda(2) == 3.0);
    CHECK(sc.m(4.0) == doctest::Approx(4.0));
    CHECK(sc.omega(0.25) == doctest::Approx(0.5));
    CHECK(sc.integrator.scheme == Scheme::rk4);
    CHECK(sc.reparam.points == 50);
    CHECK(sc.mollifier.mode == Hyperbolicity::weak);
    CHECK(sc.mollifier.s_grid.size() == 11);
    REQUIRE(sc.perturbation);
    CHECK(sc.perturbation->mode == 1);
    auto a = perturbed_velocity(sc);
    auto b = perturbed_velocity(sc);
    CHECK(a.vector() == b.vector());
    CHECK(norm_squared(a - sc.u1) == doctest::Approx(1e-6));
}

TEST_CASE("parse errors") {
    auto bad_dims = linear_config();
    bad_dims["initial"]["u0"] = {1, 2};
    CHECK_THROWS_AS(parse_scenario(bad_dims), ParseError);
    auto bad_study = linear_config();
    bad_study["study"] = "nope";
    CHECK_THROWS_AS(parse_scenario(bad_study), ParseError);
    auto bad_eig = linear_config();
    bad_eig["operator"]["eigenvalues"] = {2, 1};
    CHECK_THROWS_AS(parse_scenario(bad_eig), ParseError);
    auto bad_kind = linear_config();
    bad_kind["nonlinearity"]["kind"] = "cubic";
    CHECK_THROWS_AS(parse_scenario(bad_kind), ParseError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ParseError);
    CHECK_THROWS_AS(study_from_string("walk"), ParseError);
}

TEST_CASE("config hash is stable and sensitive") {
    auto a = linear_config();
    auto b = linear_config();
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b["integrator"]["dt"] = 2e-4;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("simulate writes a reproducible trajectory and manifest") {
    auto r1 = run_in(linear_config(), "sim1");
    auto r2 = run_in(linear_config(), "sim2");
    REQUIRE(r1.exit_code == exit_ok);
    auto csv1 = slurp(r1.out_dir / "trajectory.csv");
    CHECK(csv1 == slurp(r2.out_dir / "trajectory.csv"));
    CHECK(csv1.find('\r') == std::string::npos);
    auto manifest = json::parse(slurp(r1.out_dir / "manifest.json"));
    CHECK(manifest["config_hash"] == config_hash(linear_config()));
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["measured"]["energy_drift"].get<double>() <= 1e-8);
}

TEST_CASE("exit codes") {
    auto parse = linear_config();
    parse["initial"]["u1"] = {0, 0};
    auto rp = run_in(parse, "parse");
    CHECK(rp.exit_code == exit_parse);

    auto model = linear_config();
    model["nonlinearity"] = {{"kind", "constant"}, {"value", -1}};
    CHECK(run_in(model, "model").exit_code == exit_model);

    auto degenerate = json::parse(R"({
        "study": "reparam",
        "operator": {"eigenvalues": [1, 1]},
        "nonlinearity": {"kind": "affine", "a": 0, "b": 1},
        "initial": {"u0": [1, 0], "u1": [0, 1]},
        "integrator": {"scheme": "rk4", "dt": 1e-3, "t_end": 1}
    })");
    CHECK(run_in(degenerate, "degenerate").exit_code == exit_model);

    auto diverge = json::parse(R"({
        "study": "simulate",
        "operator": {"eigenvalues": [1]},
        "nonlinearity": {"kind": "power", "coefficient": 1, "exponent": 2},
        "initial": {"u0": [30], "u1": [0]},
        "integrator": {"scheme": "rk4", "dt": 0.5, "t_end": 50}
    })");
    auto rd = run_in(diverge, "diverge");
    CHECK(rd.exit_code == exit_divergence);
    CHECK(fs::exists(rd.out_dir / "trajectory.csv"));
    CHECK(fs::exists(rd.out_dir / "manifest.json"));
}

TEST_CASE("criterion on the degenerate eigenpair") {
    auto r = run(fs::path(KIRCHHOFF_SOURCE_DIR) / "tools" / "scenarios" / "eigenpair.json",
                 RunOptions{scratch("eigenpair"), std::nullopt, std::nullopt});
    REQUIRE(r.exit_code == exit_ok);
    auto j = json::parse(slurp(r.out_dir / "criterion.json"));
    CHECK(j["nondegenerate"] == false);
    CHECK(j["D1"] == 0.0);
    CHECK(j["D2"] == 0.0);
}

TEST_CASE("lemmas study passes") {
    auto cfg = linear_config();
    cfg["study"] = "lemmas";
    auto r = run_in(cfg, "lemmas");
    CHECK(r.exit_code == exit_ok);
    CHECK(fs::exists(r.out_dir / "lemmas.json"));
}

TEST_CASE("reparam study byte-reproduces its CSVs") {
    auto cfg = load_config(fs::path(KIRCHHOFF_SOURCE_DIR) / "tools" / "scenarios" / "two_mode.json");
    cfg["study"] = "reparam";
    auto a = run_in(cfg, "rep1");
    auto b = run_in(cfg, "rep2");
    REQUIRE(a.exit_code == exit_ok);
    for (const auto& f : a.files) {
        if (f.ends_with(".csv")) {
            CAPTURE(f);
            CHECK(slurp(a.out_dir / f) == slurp(b.out_dir / f));
        }
    }
    auto m = json::parse(slurp(a.out_dir / "manifest.json"));
    CHECK(m["measured"]["roundtrip_time_error"].get<double>() <= 1e-5);
    CHECK(m["measured"]["direct_vs_resampled"].get<double>() <= 1e-5);
}
