#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/integrator.hpp"
#include "kirchhoff/modulus.hpp"
#include "kirchhoff/reparam.hpp"
#include "kirchhoff/spectral.hpp"

namespace kirchhoff {

enum class StudyKind { simulate, reparam, criterion, agreement, mollifier, lemmas, sweep };

std::string to_string(StudyKind k);
/// Throws ParseError for an unknown name.
StudyKind study_from_string(const std::string& name);

struct MollifierSettings {
    Hyperbolicity mode = Hyperbolicity::strict;
    std::vector<double> eps;     ///< default 2^-2 .. 2^-12
    std::vector<double> s_grid;  ///< default 0 and +-2^{-j/32}, j = 0..768
    std::optional<double> s1;    ///< extension interval; default 1
};

struct ReparamSettings {
    SIntegratorConfig integrator;
    std::size_t points = 0;     ///< to_s_trajectory resolution, 0 = sample count
    double s_fraction = 0.9;    ///< integrate_s runs to this fraction of the monotone window
};

struct Perturbation {
    double delta = 0.0;
    std::size_t mode = 0;             ///< 0-based mode index of u1 that is perturbed
    std::optional<std::uint64_t> seed;  ///< when set, the direction is a seeded random unit vector
};

/// One experiment read from a JSON config file.
struct Scenario {
    StudyKind study = StudyKind::simulate;
    std::string name;
    SpectralOperator op{1.0};
    Nonlinearity m = Nonlinearity::constant(1.0);
    ContinuityModulus omega = ContinuityModulus::linear();
    WeightPhi phi = WeightPhi::identity();
    ModeVector u0{0.0};
    ModeVector u1{0.0};
    IntegratorConfig integrator;
    std::optional<IntegratorConfig> integrator_b;
    ReparamSettings reparam;
    MollifierSettings mollifier;
    std::optional<double> tolerance;
    std::optional<Perturbation> perturbation;
    bool window = true;  ///< agreement restricted to the first monotone window
    std::string output = "out";
    nlohmann::json raw;  ///< the config as read, used for hashing and sweeps
};

/// Table files are resolved relative to `base_dir`. Throws ParseError on malformed or
/// inconsistent input.
Scenario parse_scenario(const nlohmann::json& config, const std::filesystem::path& base_dir = {});
nlohmann::json load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// u1 after applying the perturbation (identity when delta = 0).
ModeVector perturbed_velocity(const Scenario& sc);

}  // namespace kirchhoff
