#include "kirchhoff/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "kirchhoff/csv.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/lab.hpp"
#include "kirchhoff/mollification.hpp"
#include "kirchhoff/quadrature.hpp"
#include "kirchhoff/reparam.hpp"

namespace kirchhoff {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = exit_ok;
    std::string message;
    json report = json::object();
    json tolerances = json::object();
    json measured = json::object();
    std::vector<std::string> files;
};

class Sink {
public:
    explicit Sink(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name, Outcome& out) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw std::runtime_error(fmt::format("cannot write '{}'", (dir_ / name).string()));
        out.files.push_back(name);
        return os;
    }

    void json_file(const std::string& name, const json& j, Outcome& out) { open(name, out) << j.dump(2) << '\n'; }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
};

json criterion_json(const CriterionReport& r) {
    return {{"D1", r.D1}, {"D2", r.D2}, {"nondegenerate", r.nondegenerate}, {"tol", r.tol}};
}

json agreement_json(const AgreementReport& r) {
    json j{{"distance", r.distance}, {"common_samples", r.common_samples}, {"t_compared", r.t_compared},
           {"partial", r.partial}};
    j["divergence_time"] = r.divergence_time ? json(*r.divergence_time) : json(nullptr);
    return j;
}

Coefficient oriented_coefficient(const Scenario& sc, double s_max, int orientation) {
    double s0 = half_power_norm_squared(sc.op, sc.u0);
    return extend_coefficient(sc.m, s0, s_max, orientation);
}

// ---------------------------------------------------------------------------

Outcome study_simulate(const Scenario& sc, Sink& sink) {
    Outcome out;
    auto r = try_integrate(sc.op, sc.m, sc.u0, sc.u1, sc.integrator);
    {
        auto os = sink.open("trajectory.csv", out);
        write_trajectory_csv(os, r.trajectory);
    }
    out.measured["energy_drift"] = relative_energy_drift(r.trajectory);
    out.measured["samples"] = r.trajectory.samples.size();
    out.measured["t_last"] = r.trajectory.samples.back().time;
    out.report = {{"scheme", to_string(sc.integrator.scheme)}, {"dt", sc.integrator.dt},
                  {"t_end", sc.integrator.t_end}, {"energy_drift", out.measured["energy_drift"]}};
    if (r.divergence_time) {
        out.code = exit_divergence;
        out.report["divergence_time"] = *r.divergence_time;
        out.message = fmt::format("diverged after t={}", *r.divergence_time);
    } else {
        out.message = fmt::format("energy drift {:.3e}", out.measured["energy_drift"].get<double>());
    }
    sink.json_file("simulate.json", out.report, out);
    return out;
}

Outcome study_reparam(const Scenario& sc, Sink& sink) {
    Outcome out;
    auto traj = integrate(sc.op, sc.m, sc.u0, sc.u1, sc.integrator);
    auto st = to_s_trajectory(traj, sc.reparam.points);
    {
        auto os = sink.open("s_trajectory.csv", out);
        write_s_trajectory_csv(os, st);
    }
    const auto window = monotone_window(traj);
    sink.json_file("s_trajectory.json",
                   {{"orientation", st.orientation}, {"D1", st.D1}, {"beta", st.beta},
                    {"gamma1_measured", st.gamma1_measured}, {"t_window", window.t_end}, {"s_max", window.s_max}},
                   out);

    auto rt = recover_time(st);
    double roundtrip = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) roundtrip = std::max(roundtrip, std::abs(rt[i] - st.time[i]));

    const double s_max = window.s_max;
    auto c = oriented_coefficient(sc, s_max, st.orientation);
    auto identity = denominator_identity(st, c, st.D1);

    auto startup = startup_params(sc.op, sc.m, sc.u0, sc.u1);
    auto z0 = apply_power(sc.op, 0.5, sc.u0);
    auto direct = integrate_s(sc.op, c, startup, z0, sc.u1, sc.reparam.s_fraction * s_max, sc.reparam.integrator);
    {
        auto os = sink.open("direct_s_trajectory.csv", out);
        write_s_trajectory_csv(os, direct);
    }
    double distance = s_trajectory_distance(direct, st, c);

    out.tolerances = {{"roundtrip_time", 1e-5}, {"direct_vs_resampled", 1e-5},
                      {"identity_residual", 1e-6 * (1.0 + std::abs(st.D1))}};
    out.measured = {{"roundtrip_time_error", roundtrip},
                    {"identity_max_residual", identity.max_residual},
                    {"identity_violations", identity.violations.size()},
                    {"direct_vs_resampled", distance},
                    {"gamma1_measured", st.gamma1_measured},
                    {"direct_truncated", direct.truncated}};
    if (direct.degeneracy_s) out.measured["direct_degeneracy_s"] = *direct.degeneracy_s;

    if (sc.perturbation && sc.perturbation->delta != 0.0) {
        const auto& p = *sc.perturbation;
        auto u1p = perturbed_velocity(sc);
        auto startup_p = startup_params(sc.op, sc.m, sc.u0, u1p);
        if (startup_p.orientation() != startup.orientation())
            throw DegenerateDataError("perturbation flips the orientation of psi");
        auto second = integrate_s(sc.op, c, startup_p, z0, u1p, sc.reparam.s_fraction * s_max, sc.reparam.integrator);
        double lambda = sc.op.lambda(p.mode);
        double eps = epsilon_for_mode(lambda, sc.omega, sc.mollifier.mode);
        MollifiedCoefficient c_eps(c, eps, sc.mollifier.mode, sc.omega);
        auto trace = energy_trace(direct, second, c, c_eps, p.mode, sc.phi);
        {
            auto os = sink.open("energy_trace.csv", out);
            write_energy_trace_csv(os, trace);
        }
        out.measured["energy"] = {{"mode", p.mode + 1},
                                  {"epsilon", eps},
                                  {"gamma", trace.gamma},
                                  {"gamma11", trace.gamma11},
                                  {"E0", trace.E0},
                                  {"max_E", trace.max_E()},
                                  {"max_E_over_delta2", trace.max_E() / (p.delta * p.delta)},
                                  {"max_residual", trace.max_residual()},
                                  {"gronwall_margin", trace.gronwall_margin()}};
        out.tolerances["energy_residual"] = 1e-8 * trace.max_E();
    }

    out.report = {{"orientation", st.orientation}, {"D1", st.D1}, {"beta", st.beta}, {"measured", out.measured}};
    sink.json_file("reparam.json", out.report, out);
    out.message = fmt::format("roundtrip {:.3e}, direct vs resampled {:.3e}", roundtrip, distance);
    return out;
}

Outcome study_criterion(const Scenario& sc, Sink& sink) {
    Outcome out;
    auto crit = evaluate_criterion(sc.op, sc.m, sc.u0, sc.u1, sc.tolerance);
    auto eig = classify_eigenpair(sc.op, sc.u0, sc.u1, sc.m, sc.tolerance);
    auto r = try_integrate(sc.op, sc.m, sc.u0, sc.u1, sc.integrator);
    auto events = scan_degeneracy(r.trajectory, crit.tol);
    {
        auto os = sink.open("degeneracy_events.csv", out);
        csv::write_header(os, {"t", "D1", "D2"});
        for (const auto& e : events) {
            double row[] = {e.t_star, e.D1_at, e.D2_at};
            csv::write_row(os, row);
        }
    }
    json eigen{{"applicable", eig.applicable}, {"reason", eig.reason}};
    if (eig.applicable) {
        eigen["AS1"] = eig.as1;
        eigen["AS2"] = eig.as2;
        eigen["AS3"] = eig.as3;
        eigen["eigenvalue"] = *eig.eigenvalue;
    }
    out.report = criterion_json(crit);
    out.report["eigenpair"] = eigen;
    out.report["degeneracy_events"] = events.size();
    out.report["samples_scanned"] = r.trajectory.samples.size();
    if (r.divergence_time) out.report["divergence_time"] = *r.divergence_time;
    out.tolerances = {{"criterion", crit.tol}};
    out.measured = {{"D1", crit.D1}, {"D2", crit.D2}, {"degeneracy_events", events.size()}};
    sink.json_file("criterion.json", out.report, out);
    out.message = fmt::format("{} (D1={:.6g}, D2={:.6g}), {} degeneracy events",
                              crit.nondegenerate ? "nondegenerate" : "degenerate", crit.D1, crit.D2, events.size());
    if (r.divergence_time) out.code = exit_divergence;
    return out;
}

Outcome study_agreement(const Scenario& sc, Sink& sink) {
    Outcome out;
    IntegratorConfig a = sc.integrator;
    IntegratorConfig b = sc.integrator_b.value_or(IntegratorConfig{
        a.scheme == Scheme::rk4 ? Scheme::stormer_verlet : Scheme::rk4, a.dt, a.t_end, a.sample_stride});
    std::optional<double> t_window;
    if (sc.window) {
        auto ref = try_integrate(sc.op, sc.m, sc.u0, sc.u1, a);
        if (!ref.divergence_time) t_window = monotone_window(ref.trajectory).t_end;
    }
    auto base = cross_solver_agreement(sc.op, sc.m, sc.u0, sc.u1, a, b, t_window);
    IntegratorConfig a2 = a, b2 = b;
    a2.dt *= 0.5;
    b2.dt *= 0.5;
    a2.sample_stride *= 2;
    b2.sample_stride *= 2;
    auto half = cross_solver_agreement(sc.op, sc.m, sc.u0, sc.u1, a2, b2, t_window);
    double ratio = half.distance > 0.0 ? base.distance / half.distance : std::numeric_limits<double>::infinity();

    auto crit = evaluate_criterion(sc.op, sc.m, sc.u0, sc.u1, sc.tolerance);
    out.report = {{"criterion", criterion_json(crit)},
                  {"a", {{"scheme", to_string(a.scheme)}, {"dt", a.dt}}},
                  {"b", {{"scheme", to_string(b.scheme)}, {"dt", b.dt}}},
                  {"t_window", t_window ? json(*t_window) : json(nullptr)},
                  {"base", agreement_json(base)},
                  {"halved", agreement_json(half)},
                  {"halving_ratio", ratio}};
    out.tolerances = {{"distance", 1e-6}, {"halving_ratio_min", 4.0}};
    out.measured = {{"distance", base.distance}, {"distance_halved", half.distance}, {"halving_ratio", ratio}};
    sink.json_file("agreement.json", out.report, out);
    out.message = fmt::format("distance {:.3e}, halved {:.3e} (ratio {:.2f})", base.distance, half.distance, ratio);
    if (base.partial || half.partial) out.code = exit_divergence;
    return out;
}

Outcome study_mollifier(const Scenario& sc, Sink& sink) {
    Outcome out;
    const auto& ms = sc.mollifier;
    double s1 = ms.s1.value_or(1.0);
    auto c = oriented_coefficient(sc, s1, 1);
    auto rep = verify_mollifier_estimates(c, sc.omega, ms.eps, ms.s_grid, ms.mode, s1);

    json sweep = json::array();
    for (const auto& e : rep.sweep)
        sweep.push_back({{"epsilon", e.epsilon}, {"gamma3", e.gamma3}, {"gamma4", e.gamma4},
                         {"c_eps_min", e.c_eps_min}, {"c_eps_max", e.c_eps_max}});
    json schedule = json::array();
    for (std::size_t k = 0; k < sc.op.size(); ++k) {
        double l = sc.op.lambda(k);
        if (!(l > 0.0)) continue;
        schedule.push_back({{"k", k + 1}, {"lambda", l}, {"epsilon", epsilon_for_mode(l, sc.omega, ms.mode)}});
    }
    out.report = {{"mode", to_string(ms.mode)},
                  {"omega", sc.omega.describe()},
                  {"gamma3", rep.gamma3},
                  {"gamma4", rep.gamma4},
                  {"gamma3_spread", rep.gamma3_spread()},
                  {"gamma4_spread", rep.gamma4_spread()},
                  {"c_eps_min", rep.c_eps_min},
                  {"c_eps_max", rep.c_eps_max},
                  {"c_min", rep.c_min},
                  {"c_max", rep.c_max},
                  {"s1", s1},
                  {"sweep", sweep},
                  {"schedule", schedule}};
    out.tolerances = {{"spread_max", 2.0}, {"bounds", 1e-10}};
    out.measured = {{"gamma3", rep.gamma3}, {"gamma4", rep.gamma4}, {"gamma3_spread", rep.gamma3_spread()},
                    {"gamma4_spread", rep.gamma4_spread()}};
    sink.json_file("mollifier.json", out.report, out);
    out.message = fmt::format("gamma3 {:.4g} (spread {:.3f}), gamma4 {:.4g} (spread {:.3f})", rep.gamma3,
                              rep.gamma3_spread(), rep.gamma4, rep.gamma4_spread());
    return out;
}

Outcome study_lemmas(const Scenario& sc, Sink& sink) {
    Outcome out;
    const auto grid = quadrature::power_grid(2.0, -20, 20);
    std::vector<std::pair<std::string, ContinuityModulus>> moduli{
        {"linear", ContinuityModulus::linear()},
        {"holder(0.5)", ContinuityModulus::holder(0.5)},
        {"holder(0.25)", ContinuityModulus::holder(0.25)},
        {"log_lipschitz", ContinuityModulus::log_lipschitz()},
        {"bounded_custom", ContinuityModulus::bounded_custom({{0, 0}, {1, 1}, {2, 1.5}, {4, 2}})},
        {"configured", sc.omega},
    };
    bool all = true;
    json lower = json::array();
    for (const auto& [name, w] : moduli) {
        auto lb = lower_bound_check(w, grid);
        auto sa = subadditivity_check(w, grid);
        all = all && lb.passed && sa.passed;
        lower.push_back({{"modulus", name},
                         {"lower_bound_passed", lb.passed},
                         {"worst_ratio", lb.worst_ratio},
                         {"subadditive", sa.passed}});
    }

    // equality case y = t e^t, eta1 = eta2 = 1
    std::vector<double> t(2001), y(t.size()), one(t.size(), 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 2.0 * static_cast<double>(i) / static_cast<double>(t.size() - 1);
        y[i] = t[i] * std::exp(t[i]);
    }
    auto cmp = comparison_bound_check(t, y, one, one);
    all = all && cmp.verdict == Verdict::pass;

    // factorial envelope for y = sqrt(t), k = 1
    std::vector<double> tt(4097), yy(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i) {
        tt[i] = static_cast<double>(i) / static_cast<double>(tt.size() - 1);
        yy[i] = std::sqrt(tt[i]);
    }
    auto it = iteration_bound_check(tt, yy, 1.0, 12);
    all = all && it.envelope_ok;

    json hyp = json::array();
    for (auto mode : {Hyperbolicity::strict, Hyperbolicity::weak}) {
        auto h = check_hyperbolicity_hypothesis(sc.omega, sc.phi, mode, default_hypothesis_grid());
        hyp.push_back({{"mode", to_string(mode)}, {"lambda", h.lambda_estimate}, {"worst_sigma", h.worst_sigma},
                       {"satisfied", h.satisfied}});
    }
    std::vector<std::pair<double, double>> pairs;
    for (double a : quadrature::geometric_grid(1e-4, 1e2, 8))
        for (double b : quadrature::geometric_grid(1e-4, 1e2, 8))
            if (a < b) pairs.emplace_back(a, b);
    double L = estimate_L(sc.m, sc.omega, pairs);

    out.report = {{"lower_bound", lower},
                  {"comparison", {{"verdict", to_string(cmp.verdict)}, {"margin", cmp.margin}}},
                  {"iteration", {{"envelope_ok", it.envelope_ok}, {"envelope_ratio", it.envelope_ratio}}},
                  {"hypothesis", hyp},
                  {"estimate_L", L},
                  {"all_passed", all}};
    out.tolerances = {{"lower_bound_relative", 1e-12}, {"comparison_relative", 1e-12}, {"envelope", 1e-9}};
    out.measured = {{"estimate_L", L}, {"comparison_margin", cmp.margin}};
    sink.json_file("lemmas.json", out.report, out);
    out.message = all ? "all lemma checks passed" : "some lemma checks failed";
    if (!all) out.code = exit_check_failed;
    return out;
}

Outcome dispatch(const Scenario& sc, Sink& sink) {
    switch (sc.study) {
        case StudyKind::simulate: return study_simulate(sc, sink);
        case StudyKind::reparam: return study_reparam(sc, sink);
        case StudyKind::criterion: return study_criterion(sc, sink);
        case StudyKind::agreement: return study_agreement(sc, sink);
        case StudyKind::mollifier: return study_mollifier(sc, sink);
        case StudyKind::lemmas: return study_lemmas(sc, sink);
        case StudyKind::sweep: break;
    }
    throw ParseError("sweep is not a single study");
}

void write_manifest(RunResult& result, const json& config, const std::string& study, const Outcome& o,
                    std::optional<std::uint64_t> seed) {
    result.manifest = {{"config_hash", config_hash(config)},
                       {"study", study},
                       {"exit_code", result.exit_code},
                       {"message", result.message},
                       {"seed", seed ? json(*seed) : json(nullptr)},
                       {"tolerances", o.tolerances},
                       {"measured", o.measured},
                       {"files", o.files}};
    if (result.out_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(result.out_dir, ec);
    std::ofstream os(result.out_dir / "manifest.json", std::ios::binary);
    if (os) os << result.manifest.dump(2) << '\n';
    result.files = o.files;
    result.files.push_back("manifest.json");
}

RunResult run_sweep(const json& config, const fs::path& base_dir, const RunOptions& options, const fs::path& out_dir) {
    if (!config.contains("studies") || !config.at("studies").is_array() || config.at("studies").empty())
        throw ParseError("sweep needs a non-empty 'studies' array");
    json base = config;
    base.erase("studies");
    base.erase("study");
    base.erase("output");

    std::vector<std::pair<std::string, json>> jobs;
    std::size_t index = 0;
    for (const auto& entry : config.at("studies")) {
        if (!entry.is_object()) throw ParseError("each sweep entry must be an object");
        json merged = base;
        merged.merge_patch(entry);
        if (merged.value("study", std::string()) == "sweep") throw ParseError("nested sweeps are not supported");
        std::string name = entry.value("name", fmt::format("{:02d}_{}", index, merged.value("study", "simulate")));
        merged["name"] = name;
        jobs.emplace_back(name, std::move(merged));
        ++index;
    }

    std::vector<std::future<RunResult>> futures;
    for (const auto& [name, cfg] : jobs) {
        RunOptions sub = options;
        sub.study.reset();
        sub.out = out_dir / name;
        futures.push_back(std::async(std::launch::async, [cfg = cfg, base_dir, sub] {
            return run_config(cfg, base_dir, sub);
        }));
    }

    RunResult result;
    result.out_dir = out_dir;
    Outcome o;
    json studies = json::array();
    for (std::size_t i = 0; i < futures.size(); ++i) {
        auto r = futures[i].get();
        result.exit_code = std::max(result.exit_code, r.exit_code);
        studies.push_back({{"name", jobs[i].first}, {"exit_code", r.exit_code}, {"message", r.message}});
        o.measured[jobs[i].first] = r.manifest.value("measured", json::object());
        for (const auto& f : r.files) o.files.push_back(jobs[i].first + "/" + f);
    }
    o.report = {{"studies", studies}};
    Sink(out_dir).json_file("sweep.json", o.report, o);
    result.message = fmt::format("{} studies, worst exit code {}", jobs.size(), result.exit_code);
    write_manifest(result, config, "sweep", o, options.seed);
    return result;
}

}  // namespace

RunResult run_config(const json& config_in, const fs::path& base_dir, const RunOptions& options) {
    RunResult result;
    Outcome outcome;
    json config = config_in;
    std::string study = "unknown";
    try {
        if (!config.is_object()) throw ParseError("config must be a JSON object");
        if (options.study) config["study"] = to_string(*options.study);
        if (options.seed && config.contains("perturbation")) config["perturbation"]["seed"] = *options.seed;
        result.out_dir = options.out ? *options.out : fs::path(config.value("output", std::string("out")));
        if (result.out_dir.is_relative() && !options.out) result.out_dir = base_dir / result.out_dir;

        study = config.value("study", std::string("simulate"));
        if (study_from_string(study) == StudyKind::sweep) return run_sweep(config, base_dir, options, result.out_dir);

        auto sc = parse_scenario(config, base_dir);
        Sink sink(result.out_dir);
        try {
            outcome = dispatch(sc, sink);
        } catch (const DivergenceError& e) {
            outcome.code = exit_divergence;
            outcome.message = e.what();
            outcome.measured["last_good_time"] = e.last_good_time();
        }
        result.exit_code = outcome.code;
        result.message = outcome.message;
    } catch (const ParseError& e) {
        result.exit_code = exit_parse;
        result.message = e.what();
    } catch (const nlohmann::json::exception& e) {
        result.exit_code = exit_parse;
        result.message = e.what();
    } catch (const ParameterError& e) {
        result.exit_code = exit_parse;
        result.message = e.what();
    } catch (const DivergenceError& e) {
        result.exit_code = exit_divergence;
        result.message = e.what();
    } catch (const Error& e) {
        result.exit_code = exit_model;
        result.message = e.what();
    } catch (const std::exception& e) {
        result.exit_code = exit_model;
        result.message = e.what();
    }
    write_manifest(result, config, study, outcome, options.seed);
    return result;
}

RunResult run(const fs::path& config_path, const RunOptions& options) {
    json config;
    try {
        config = load_config(config_path);
    } catch (const ParseError& e) {
        RunResult r;
        r.exit_code = exit_parse;
        r.message = e.what();
        if (options.out) {
            r.out_dir = *options.out;
            write_manifest(r, json(nullptr), "unknown", Outcome{}, options.seed);
        }
        return r;
    }
    return run_config(config, config_path.parent_path(), options);
}

}  // namespace kirchhoff
