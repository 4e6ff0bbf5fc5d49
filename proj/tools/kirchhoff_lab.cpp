#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "kirchhoff/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral Galerkin laboratory for the Kirchhoff equation"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool quiet = false;

    const std::pair<const char*, const char*> studies[] = {
        {"simulate", "integrate in time; trajectory CSV and energy drift"},
        {"reparam", "s-parametrization, time recovery, denominator identity, energy trace"},
        {"criterion", "nondegeneracy criterion, eigenpair classification, degeneracy scan"},
        {"agreement", "cross-scheme distance and its step-halving ratio"},
        {"mollifier", "mollifier constants over an epsilon sweep and per-mode schedule"},
        {"lemmas", "modulus, comparison and iteration checks on built-in fixtures"},
        {"sweep", "run the `studies` list of a config in parallel"},
    };
    for (const auto& [name, help] : studies) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "seed for the perturbation direction");
        sub->add_flag("--quiet", quiet, "print nothing on success");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kirchhoff::exit_parse;
    }

    auto* chosen = app.get_subcommands().front();
    kirchhoff::RunOptions options;
    options.study = kirchhoff::study_from_string(chosen->get_name());
    if (!out.empty()) options.out = out;
    if (chosen->count("--seed")) options.seed = seed;

    auto result = kirchhoff::run(config, options);
    if (result.exit_code != kirchhoff::exit_ok)
        std::cerr << chosen->get_name() << ": " << result.message << " (exit " << result.exit_code << ")\n";
    else if (!quiet)
        std::cout << chosen->get_name() << ": " << result.message << " -> " << result.out_dir.string() << "\n";
    return result.exit_code;
}
