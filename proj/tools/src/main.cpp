#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "phonongate/cli/runner.hpp"
#include "phonongate/cli/scenarios.hpp"

int main(int argc, char** argv) {
    namespace cli = phonongate::cli;

    CLI::App app{"phonongate: spin-phonon gate simulations and figure reproductions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;
    auto* run = app.add_subcommand("run", "run the scenario described by a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, std::string("output directory (overrides $") + cli::kOutputEnv + ")");
    run->add_flag("--strict", strict, "treat warnings as failures");

    auto* list = app.add_subcommand("list", "list registered scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitUsage;
    }

    if (list->parsed()) {
        for (const auto& s : cli::scenarios()) std::cout << s.name << "\t" << s.summary << '\n';
        return cli::kExitPass;
    }
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    return cli::run_file(config_path, out, strict, std::cout);
}
