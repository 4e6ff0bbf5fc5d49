#include "kirchhoff/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "kirchhoff/csv.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

using nlohmann::json;

std::string to_string(StudyKind k) {
    switch (k) {
        case StudyKind::simulate: return "simulate";
        case StudyKind::reparam: return "reparam";
        case StudyKind::criterion: return "criterion";
        case StudyKind::agreement: return "agreement";
        case StudyKind::mollifier: return "mollifier";
        case StudyKind::lemmas: return "lemmas";
        case StudyKind::sweep: return "sweep";
    }
    return "?";
}

StudyKind study_from_string(const std::string& name) {
    for (auto k : {StudyKind::simulate, StudyKind::reparam, StudyKind::criterion, StudyKind::agreement,
                   StudyKind::mollifier, StudyKind::lemmas, StudyKind::sweep})
        if (to_string(k) == name) return k;
    throw ParseError(fmt::format("unknown study '{}'", name));
}

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(fmt::format("missing key '{}'", key));
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError(fmt::format("'{}' must be a number", key));
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

std::string text(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) throw ParseError(fmt::format("'{}' must be a string", key));
    return j.at(key).get<std::string>();
}

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(fmt::format("'{}' must be an array of numbers", what));
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(fmt::format("'{}' must be an array of numbers", what));
        out.push_back(v.get<double>());
    }
    return out;
}

using Table = std::vector<std::pair<double, double>>;

Table table(const json& j, const std::filesystem::path& base) {
    if (j.contains("path")) {
        auto p = std::filesystem::path(text(j, "path"));
        if (p.is_relative()) p = base / p;
        return csv::read_two_column(p.string());
    }
    if (!j.contains("samples") || !j.at("samples").is_array()) throw ParseError("table needs 'path' or 'samples'");
    Table out;
    for (const auto& row : j.at("samples")) {
        auto xy = numbers(row, "samples");
        if (xy.size() != 2) throw ParseError("table samples must be [x, y] pairs");
        out.emplace_back(xy[0], xy[1]);
    }
    return out;
}

SpectralOperator parse_operator(const json& j) {
    if (j.contains("eigenvalues")) return SpectralOperator(numbers(j.at("eigenvalues"), "eigenvalues"));
    if (j.contains("rule")) {
        const auto& r = j.at("rule");
        double count = number(r, "count");
        if (!(count >= 1.0) || count != std::floor(count)) throw ParseError("rule.count must be a positive integer");
        return SpectralOperator::power_law(static_cast<std::size_t>(count), number_or(r, "power", 1.0));
    }
    throw ParseError("operator needs 'eigenvalues' or 'rule'");
}

Nonlinearity parse_nonlinearity(const json& j, const std::filesystem::path& base) {
    auto kind = text(j, "kind");
    if (kind == "constant") return Nonlinearity::constant(number(j, "value"));
    if (kind == "affine") return Nonlinearity::affine(number(j, "a"), number(j, "b"));
    if (kind == "power") return Nonlinearity::power(number_or(j, "coefficient", 1.0), number(j, "exponent"));
    if (kind == "table") return Nonlinearity::table(table(j, base));
    throw ParseError(fmt::format("unknown nonlinearity kind '{}'", kind));
}

ContinuityModulus parse_modulus(const json& j, const std::filesystem::path& base) {
    auto kind = text(j, "kind");
    std::optional<double> cap;
    if (j.contains("cap")) cap = number(j, "cap");
    ContinuityModulus omega = ContinuityModulus::linear();
    if (kind == "linear")
        omega = ContinuityModulus::linear();
    else if (kind == "holder")
        omega = ContinuityModulus::holder(number(j, "beta"));
    else if (kind == "log_lipschitz")
        omega = ContinuityModulus::log_lipschitz();
    else if (kind == "bounded_custom")
        return ContinuityModulus::bounded_custom(table(j, base), cap);
    else
        throw ParseError(fmt::format("unknown modulus kind '{}'", kind));
    return cap ? omega.capped(*cap) : omega;
}

WeightPhi parse_phi(const json& j, const std::filesystem::path& base) {
    auto kind = text(j, "kind");
    if (kind == "power") return WeightPhi::power(number(j, "exponent"));
    if (kind == "identity") return WeightPhi::identity();
    if (kind == "constant") return WeightPhi::constant(number(j, "value"));
    if (kind == "logarithmic") return WeightPhi::logarithmic();
    if (kind == "table") return WeightPhi::table(table(j, base));
    throw ParseError(fmt::format("unknown phi kind '{}'", kind));
}

IntegratorConfig parse_integrator(const json& j) {
    IntegratorConfig cfg;
    if (j.contains("scheme")) cfg.scheme = scheme_from_string(text(j, "scheme"));
    cfg.dt = number_or(j, "dt", cfg.dt);
    cfg.t_end = number_or(j, "t_end", cfg.t_end);
    double stride = number_or(j, "sample_stride", 1.0);
    if (!(stride >= 1.0) || stride != std::floor(stride)) throw ParseError("sample_stride must be a positive integer");
    cfg.sample_stride = static_cast<int>(stride);
    cfg.validate();
    return cfg;
}

std::vector<double> grid(const json& j, const char* what) {
    if (j.is_array()) return numbers(j, what);
    if (j.is_object()) {
        double lo = number(j, "lo"), hi = number(j, "hi");
        double points = number(j, "points");
        if (!(points >= 2.0)) throw ParseError(fmt::format("'{}.points' must be >= 2", what));
        std::size_t n = static_cast<std::size_t>(points);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return out;
    }
    throw ParseError(fmt::format("'{}' must be an array or {{lo, hi, points}}", what));
}

std::vector<double> default_s_grid() {
    std::vector<double> out{0.0};
    for (int j = 0; j <= 768; ++j) {
        double v = std::exp2(-j / 32.0);
        out.push_back(v);
        out.push_back(-v);
    }
    return out;
}

}  // namespace

Scenario parse_scenario(const json& config, const std::filesystem::path& base_dir) {
    if (!config.is_object()) throw ParseError("config must be a JSON object");
    try {
        Scenario sc;
        sc.raw = config;
        sc.study = study_from_string(config.value("study", std::string("simulate")));
        sc.name = config.value("name", to_string(sc.study));
        if (config.contains("output")) sc.output = text(config, "output");
        if (sc.study == StudyKind::sweep) return sc;

        if (config.contains("operator")) sc.op = parse_operator(config.at("operator"));
        if (config.contains("nonlinearity")) sc.m = parse_nonlinearity(config.at("nonlinearity"), base_dir);
        if (config.contains("modulus")) sc.omega = parse_modulus(config.at("modulus"), base_dir);
        if (config.contains("phi")) sc.phi = parse_phi(config.at("phi"), base_dir);

        const std::size_t K = sc.op.size();
        sc.u0 = ModeVector(K);
        sc.u1 = ModeVector(K);
        if (config.contains("initial")) {
            const auto& init = config.at("initial");
            if (init.contains("u0")) sc.u0 = ModeVector(numbers(init.at("u0"), "u0"));
            if (init.contains("u1")) sc.u1 = ModeVector(numbers(init.at("u1"), "u1"));
        }
        if (sc.u0.size() != K || sc.u1.size() != K)
            throw ParseError(fmt::format("initial data must have {} modes (operator size)", K));

        if (config.contains("integrator")) sc.integrator = parse_integrator(config.at("integrator"));
        if (config.contains("integrator_b")) sc.integrator_b = parse_integrator(config.at("integrator_b"));

        if (config.contains("reparam")) {
            const auto& r = config.at("reparam");
            sc.reparam.integrator.ds = number_or(r, "ds", sc.reparam.integrator.ds);
            sc.reparam.integrator.startup_substeps =
                static_cast<int>(number_or(r, "startup_substeps", sc.reparam.integrator.startup_substeps));
            sc.reparam.points = static_cast<std::size_t>(number_or(r, "points", 0.0));
            sc.reparam.s_fraction = number_or(r, "s_fraction", sc.reparam.s_fraction);
            if (!(sc.reparam.s_fraction > 0.0 && sc.reparam.s_fraction <= 1.0))
                throw ParseError("reparam.s_fraction must lie in (0, 1]");
        }

        sc.mollifier.eps = quadrature::power_grid(2.0, -12, -2);
        sc.mollifier.s_grid = default_s_grid();
        if (config.contains("mollifier")) {
            const auto& mo = config.at("mollifier");
            if (mo.contains("mode")) {
                auto mode = text(mo, "mode");
                if (mode == "strict")
                    sc.mollifier.mode = Hyperbolicity::strict;
                else if (mode == "weak")
                    sc.mollifier.mode = Hyperbolicity::weak;
                else
                    throw ParseError(fmt::format("unknown mollifier mode '{}'", mode));
            }
            if (mo.contains("eps")) sc.mollifier.eps = numbers(mo.at("eps"), "eps");
            if (mo.contains("s_grid")) sc.mollifier.s_grid = grid(mo.at("s_grid"), "s_grid");
            if (mo.contains("s1")) sc.mollifier.s1 = number(mo, "s1");
        }

        if (config.contains("tolerance")) sc.tolerance = number(config, "tolerance");
        if (config.contains("perturbation")) {
            const auto& p = config.at("perturbation");
            Perturbation pert;
            pert.delta = number(p, "delta");
            double mode = number_or(p, "mode", 1.0);
            if (!(mode >= 1.0) || mode > static_cast<double>(K) || mode != std::floor(mode))
                throw ParseError(fmt::format("perturbation.mode must be an integer in 1..{}", K));
            pert.mode = static_cast<std::size_t>(mode) - 1;
            if (p.contains("seed")) pert.seed = p.at("seed").get<std::uint64_t>();
            sc.perturbation = pert;
        }
        if (config.contains("window")) sc.window = config.at("window").get<bool>();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    } catch (const DimensionError& e) {
        throw ParseError(e.what());
    } catch (const ParameterError& e) {
        throw ParseError(e.what());
    }
}

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open config '{}'", path.string()));
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

ModeVector perturbed_velocity(const Scenario& sc) {
    if (!sc.perturbation || sc.perturbation->delta == 0.0) return sc.u1;
    const auto& p = *sc.perturbation;
    ModeVector dir(sc.u1.size());
    if (p.seed) {
        std::mt19937_64 rng(*p.seed);
        std::normal_distribution<double> normal;
        double norm = 0.0;
        while (norm == 0.0) {
            for (std::size_t k = 0; k < dir.size(); ++k) dir[k] = normal(rng);
            norm = std::sqrt(norm_squared(dir));
        }
        dir *= 1.0 / norm;
    } else {
        dir[p.mode] = 1.0;
    }
    return sc.u1 + p.delta * dir;
}

}  // namespace kirchhoff
