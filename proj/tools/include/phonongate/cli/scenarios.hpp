#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonongate/cli/config.hpp"
#include "phonongate/cli/csv.hpp"
#include "phonongate/cli/report.hpp"

namespace phonongate::cli {

struct ScenarioContext {
    const Config& config;
    std::filesystem::path out_dir;
    Report& report;

    /// Opens `file` inside the output directory and lists it in the report.
    CsvWriter csv(const std::string& file, std::vector<std::string> header) const;
};

using ScenarioFn = void (*)(ScenarioContext&);

struct ScenarioInfo {
    std::string_view name;
    std::string_view summary;
    ScenarioFn run;
};

std::span<const ScenarioInfo> scenarios();
const ScenarioInfo* find_scenario(std::string_view name);

void scenario_fig2(ScenarioContext& ctx);
void scenario_fig3b(ScenarioContext& ctx);
void scenario_fig4a(ScenarioContext& ctx);
void scenario_fig4b(ScenarioContext& ctx);
void scenario_infidelity_table(ScenarioContext& ctx);
void scenario_sec6_feasibility(ScenarioContext& ctx);
void scenario_damping_basis_validate(ScenarioContext& ctx);
void scenario_heff_consistency(ScenarioContext& ctx);
void scenario_gate(ScenarioContext& ctx);
void scenario_sweep(ScenarioContext& ctx);

}  // namespace phonongate::cli
