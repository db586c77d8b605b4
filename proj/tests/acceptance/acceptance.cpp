// Runs the shipped scenario configs and prints one PASS/FAIL line per
// acceptance criterion. Exit status is 0 only if every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phonongate/cli/config.hpp"
#include "phonongate/cli/csv.hpp"
#include "phonongate/cli/runner.hpp"

namespace fs = std::filesystem;
namespace cli = phonongate::cli;

namespace {

struct Run {
    std::optional<cli::Report> report;
    std::string error;
    double seconds = 0.0;
};

class Runs {
public:
    Runs(fs::path config_dir, fs::path out_root) : config_dir_(std::move(config_dir)), out_root_(std::move(out_root)) {}

    const Run& get(const std::string& scenario) {
        if (auto it = cache_.find(scenario); it != cache_.end()) return it->second;
        Run r;
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto config = cli::RunConfig::from(cli::Config::load(config_dir_ / (scenario + ".conf")));
            r.report = cli::run(config, out_root_ / scenario, false).report;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return cache_.emplace(scenario, std::move(r)).first->second;
    }

private:
    fs::path config_dir_;
    fs::path out_root_;
    std::map<std::string, Run> cache_;
};

using Selector = std::function<bool(const cli::Check&)>;

struct Criterion {
    int id;
    std::string title;
    std::string scenario;
    Selector select;
    double budget_s;
};

Selector all() {
    return [](const cli::Check&) { return true; };
}

Selector prefixed(std::vector<std::string> prefixes) {
    return [p = std::move(prefixes)](const cli::Check& c) {
        for (const auto& s : p)
            if (c.name.starts_with(s)) return true;
        return false;
    };
}

bool evaluate(const Criterion& cr, Runs& runs) {
    const Run& run = runs.get(cr.scenario);
    std::ostringstream detail;
    bool ok = run.report.has_value();
    int selected = 0, failed = 0;
    std::string first_failure;
    if (ok) {
        for (const auto& c : run.report->checks()) {
            if (!cr.select(c)) continue;
            ++selected;
            if (!c.passed) {
                ++failed;
                if (first_failure.empty()) first_failure = c.name + " = " + cli::format_number(c.value);
            }
        }
        ok = selected > 0 && failed == 0;
        detail << selected - failed << "/" << selected << " checks";
        if (!first_failure.empty()) detail << "; first failure: " << first_failure;
    } else {
        detail << "error: " << run.error;
    }
    const bool in_time = run.seconds <= cr.budget_s;
    ok = ok && in_time;

    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s of %.0f s", run.seconds, cr.budget_s);
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << cr.id << "] " << cr.title << " (" << cr.scenario << "): "
              << detail.str() << "; " << timing << (in_time ? "" : ", over budget") << std::endl;
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phonongate acceptance criteria"};
    std::string out = "acceptance-out";
    std::string config_dir = PHONONGATE_CONFIG_DIR;
    std::vector<int> only;
    app.add_option("--out", out, "directory for scenario outputs");
    app.add_option("--configs", config_dir, "directory holding <scenario>.conf files");
    app.add_option("--only", only, "run only these criterion numbers");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "thermal infidelity spot value", "infidelity-table", prefixed({"|dF_thermal("}), 1.0},
        {2, "unprotected threshold and phase-sum oracle", "infidelity-table",
         prefixed({"dF_unprotected(", "|brute-force"}), 1.0},
        {3, "exact vs effective protected dynamics", "fig2", all(), 60.0},
        {4, "effective-model Lindblad self-consistency", "heff-consistency", all(), 30.0},
        {5, "spin dephasing closed form vs integration", "fig4a", all(), 60.0},
        {6, "mechanical damping closed form vs integration", "fig4b", all(), 60.0},
        {7, "damping-basis eigenelements", "damping-basis-validate", all(), 120.0},
        {8, "four-spin gate truth table", "gate", all(), 300.0},
        {9, "flip-flop selectivity", "fig3b", all(), 30.0},
        {10, "device feasibility under both Gamma units", "sec6-feasibility", all(), 1.0},
    };

    Runs runs(config_dir, out);
    int failed = 0, ran = 0;
    for (const auto& cr : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
        ++ran;
        if (!evaluate(cr, runs)) ++failed;
    }
    std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
