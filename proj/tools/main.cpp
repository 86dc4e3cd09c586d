#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "workreal_cli/config.hpp"
#include "workreal_cli/runner.hpp"

using namespace workreal::cli;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string beta;
    std::string n_max;
    std::string seed;
    std::string grid_spec;
    std::string entropy_base;
    std::string degeneracy;
    std::optional<std::size_t> threads;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key = value configuration file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--beta", f.beta, "inverse temperature");
    sub->add_option("--n-max", f.n_max, "Fock truncation (default: automatic)");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--grid-spec", f.grid_spec, "axis=lo:hi:n;axis=v1,v2");
    sub->add_option("--entropy-base", f.entropy_base, "e or 2");
    sub->add_option("--degeneracy", f.degeneracy, "fine or grouped");
    sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leggett-Garg and work-statistics sweeps"};
    app.set_version_flag("--version", WORKREAL_VERSION_STRING);
    app.require_subcommand(1);
    Flags flags;
    std::map<CLI::App*, Experiment> experiments;
    for (auto e : {Experiment::TlsTheta, Experiment::SqueezeGrid, Experiment::SqueezeBeta,
                   Experiment::JarzynskiCheck, Experiment::McCrosscheck}) {
        auto* sub = app.add_subcommand(std::string(experiment_name(e)));
        add_flags(sub, flags);
        experiments[sub] = e;
    }
    app.get_subcommand("squeeze-grid")->description("oscillator K_en on an (r1, r2) grid with contours");
    app.get_subcommand("squeeze-beta")->description("minimum of K_en along r1 = r2 versus beta");
    app.get_subcommand("jarzynski-check")->description("Jarzynski identity on random two-level draws and the oscillator");
    app.get_subcommand("mc-crosscheck")->description("sampled measurement records against the exact joint");
    app.get_subcommand("tls-theta")->description("two-level K parameters over the mixing angle");

    CLI11_PARSE(app, argc, argv);

    SweepConfig config;
    try {
        const auto* chosen = app.get_subcommands().front();
        const Experiment experiment = experiments.at(const_cast<CLI::App*>(chosen));
        if (!flags.config.empty()) load_config_file(flags.config, config);
        if (config.experiment != experiment && !config.echo.empty()) {
            for (const auto& [key, value] : config.echo) {
                if (key == "experiment") {
                    throw ConfigError(0, "experiment", "config names " + value + " but the subcommand is " +
                                                           std::string(experiment_name(experiment)));
                }
            }
        }
        config.experiment = experiment;
        const std::pair<const char*, const std::string*> overrides[] = {
            {"out", &flags.out},         {"beta", &flags.beta},
            {"n_max", &flags.n_max},     {"seed", &flags.seed},
            {"grid", &flags.grid_spec},  {"entropy_base", &flags.entropy_base},
            {"degeneracy", &flags.degeneracy},
        };
        for (const auto& [key, value] : overrides) {
            if (!value->empty()) config.set(key, *value);
        }
        std::optional<std::size_t> threads = flags.threads;
        if (!threads) {
            for (const auto& [key, value] : config.echo)
                if (key == "threads") threads = config.threads;
        }
        config.threads = resolve_threads(threads, std::getenv("WORKREAL_THREADS"));
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    return run(config, std::cerr).exit_code;
}
