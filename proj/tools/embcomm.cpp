#include "embcomm/cli/commands.hpp"
#include "embcomm/cli/config.hpp"
#include "embcomm/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    using namespace embcomm;

    CLI::App app{"Embodied-communication analysis toolkit"};
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--set", overrides, "Override as section.key=value (repeatable)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Simulation seed (overrides sim.seed)");
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"field", "Reliability field grid and polar profile"},
        {"codebook", "Hexagonal codebook design and verification"},
        {"sweep", "Rate and bounds over the SNR x L grid"},
        {"bounds", "Converse bounds per sweep point"},
        {"lstar", "Optimal snapshot number versus SNR"},
        {"simulate", "Monte Carlo error estimation against the bounds"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitValidation;
    }

    cli::RunConfig cfg;
    try {
        cfg = cli::load_config(config_path, overrides);
        if (seed) {
            cfg.sim.seed = *seed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return cli::kExitIo;
    }
    return cli::run_command(app.get_subcommands().front()->get_name(), cfg, out_dir, std::cout, std::cerr);
}
