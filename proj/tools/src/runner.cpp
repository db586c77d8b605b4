#include "phonongate/cli/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "phonongate/cli/scenarios.hpp"
#include "phonongate/errors.hpp"

namespace phonongate::cli {

std::filesystem::path resolve_output(const RunConfig& config, const std::optional<std::filesystem::path>& cli_out) {
    if (cli_out) return *cli_out;
    if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
    if (config.output) return *config.output;
    return std::filesystem::path("phonongate-out") / config.scenario;
}

RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir, bool strict) {
    const ScenarioInfo* info = find_scenario(config.scenario);
    if (info == nullptr) throw ConfigError("unknown scenario '" + config.scenario + "'");
    std::filesystem::create_directories(out_dir);

    RunOutcome outcome{kExitFail, Report(config.scenario), out_dir};
    ScenarioContext ctx{config.values, out_dir, outcome.report};
    const auto start = std::chrono::steady_clock::now();
    try {
        info->run(ctx);
    } catch (const ConfigError&) {
        throw;
    } catch (const ParameterError&) {
        throw;
    } catch (const Error& e) {
        outcome.report.holds("scenario completed", false, e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& key : config.values.unused_keys()) outcome.report.warn("unused config key '" + key + "'");

    std::ostringstream os;
    os.precision(3);
    os << "elapsed " << std::fixed << elapsed << " s";
    outcome.report.note(os.str());
    outcome.report.write(out_dir / "report.txt", strict);
    outcome.exit_code = outcome.report.passed(strict) ? kExitPass : kExitFail;
    return outcome;
}

int run_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& cli_out,
             bool strict, std::ostream& log) {
    try {
        const RunConfig config = RunConfig::from(Config::load(config_path));
        const auto out_dir = resolve_output(config, cli_out);
        const auto outcome = run(config, out_dir, strict);
        log << config.scenario << ": " << (outcome.exit_code == kExitPass ? "PASS" : "FAIL") << " ("
            << outcome.report.checks().size() << " checks, " << outcome.report.warnings().size() << " warnings) -> "
            << (out_dir / "report.txt").string() << '\n';
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        log << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        log << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kExitFail;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return kExitFail;
    }
}

}  // namespace phonongate::cli
