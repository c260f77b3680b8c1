#include "landau/cli/commands.hpp"
#include "landau/cli/config.hpp"
#include "landau/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Vlasov-Poisson Landau damping toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    landau::cli::RunOptions opts;
    app.add_option("--config", config_path, "INI configuration file (defaults apply when omitted)");
    app.add_option("--out", opts.out_dir, "output directory (overrides [output] directory)");
    app.add_option("--threads", opts.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", opts.seed, "seed for random initial modes");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

    const char* names[][2] = {{"penrose", "dispersion relation: stability margin, strip width, roots"},
                              {"linear", "linearized density by the Volterra and resolvent routes"},
                              {"nonlinear", "full spectral solver in the free-transport frame"},
                              {"echo", "two-wave echo experiment against the Picard prediction"},
                              {"norms", "generator-function profile and inequality checks from snapshots"},
                              {"report", "aggregate the JSON summaries in the output directory"}};
    for (auto& n : names) app.add_subcommand(n[0], n[1]);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const landau::cli::ExperimentConfig cfg =
            config_path.empty() ? landau::cli::parse("") : landau::cli::parse_file(config_path);
        if (print_config) {
            std::cout << landau::cli::echo(cfg);
            return 0;
        }
        return landau::cli::run_command(command, cfg, opts, std::cerr);
    } catch (const landau::cli::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return landau::cli::exit_error;
    } catch (const landau::StabilityError& e) {
        std::cerr << "error: " << e.what();
        if (e.suggested_dt() > 0.0) std::cerr << " (suggested dt <= " << e.suggested_dt() << ")";
        std::cerr << "\n";
        return landau::cli::exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return landau::cli::exit_error;
    }
}
