// Command-line front end: configuration-driven solving, identity
// verification, manufactured problems, model tables, and bound reports.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sigmak/run.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool experimental = false;
};

sigmak::RunConfig load_with_flags(const CommonFlags& flags) {
    sigmak::RunConfig c = sigmak::load_config(flags.config);
    if (flags.seed_set) c.seed = flags.seed;
    if (!flags.out.empty()) c.out_dir = flags.out;
    if (flags.experimental) c.experimental_ack = true;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma-k curvature equations on the flat torus: solve, verify, audit"};
    app.require_subcommand(1);

    CommonFlags flags;
    long trials = 1000;
    int n_min = 2;
    int n_max = 6;
    bool inject_fault = false;

    CLI::App* verify = app.add_subcommand("verify-identities",
                                          "run the randomized symmetric-function identity suite");
    verify->add_option("--trials", trials, "trials per dimension/level pair");
    verify->add_option("--n-min", n_min, "smallest matrix dimension");
    verify->add_option("--n-max", n_max, "largest matrix dimension");
    verify->add_option("--seed", flags.seed, "random seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    verify->add_option("--out", flags.out, "report file path");
    verify->add_flag("--inject-newton-sign-flip", inject_fault)->group(""); // test-only

    CLI::App* solve = app.add_subcommand("solve", "solve a configured problem and write its bundle");
    solve->add_option("--config", flags.config, "configuration JSON path")->required();
    solve->add_option("--out", flags.out, "output directory (overrides the config)");
    solve->add_option("--seed", flags.seed, "random seed (overrides the config)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    solve->add_flag("--experimental", flags.experimental,
                    "acknowledge experimental variants");

    CLI::App* manufacture =
        app.add_subcommand("manufacture", "emit a problem whose exact solution is known");
    manufacture->add_option("--config", flags.config, "configuration JSON path")->required();
    manufacture->add_option("--out", flags.out, "output directory (overrides the config)");

    CLI::App* models = app.add_subcommand("models", "print the model-geometry invariant table");
    models->add_option("--out", flags.out, "output directory for CSV/JSONL");

    CLI::App* bounds =
        app.add_subcommand("bounds", "report a-priori bounds and constants without solving");
    bounds->add_option("--config", flags.config, "configuration JSON path")->required();
    bounds->add_option("--out", flags.out, "output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sigmak::kExitConfig;
    }

    try {
        if (verify->parsed()) {
            sigmak::IdentitySuiteConfig cfg;
            cfg.n_min = n_min;
            cfg.n_max = n_max;
            cfg.trials = trials;
            if (flags.seed_set) cfg.seed = flags.seed;
            cfg.fault = inject_fault ? sigmak::IdentityFault::newton_sign_flip
                                     : sigmak::IdentityFault::none;
            return sigmak::cmd_verify_identities(cfg, flags.out, std::cout);
        }
        if (solve->parsed()) return sigmak::cmd_solve(load_with_flags(flags), std::cout);
        if (manufacture->parsed()) return sigmak::cmd_manufacture(load_with_flags(flags), std::cout);
        if (models->parsed()) return sigmak::cmd_models(flags.out, std::cout);
        if (bounds->parsed()) return sigmak::cmd_bounds(load_with_flags(flags), std::cout);
    } catch (const sigmak::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sigmak::kExitConfig;
    } catch (const sigmak::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sigmak::kExitConfig;
    } catch (const sigmak::NotAdmissible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sigmak::kExitNotAdmissible;
    } catch (const sigmak::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sigmak::kExitNoConvergence;
    }
    return 0;
}
