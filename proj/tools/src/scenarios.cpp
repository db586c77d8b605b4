#include "phonongate/cli/scenarios.hpp"

#include <algorithm>
#include <array>

namespace phonongate::cli {

CsvWriter ScenarioContext::csv(const std::string& file, std::vector<std::string> header) const {
    report.artifact(file);
    return CsvWriter(out_dir / file, std::move(header));
}

namespace {

constexpr std::array kScenarios{
    ScenarioInfo{"fig2", "exact Tavis-Cummings vs effective protected dynamics", scenario_fig2},
    ScenarioInfo{"fig3b", "resonant, suppressed and common-shift flip-flop", scenario_fig3b},
    ScenarioInfo{"fig4a", "spin dephasing: closed form vs Lindblad integration", scenario_fig4a},
    ScenarioInfo{"fig4b", "mechanical damping: Y(t) closed form vs Lindblad integration", scenario_fig4b},
    ScenarioInfo{"infidelity-table", "thermal, unprotected and total gate infidelity", scenario_infidelity_table},
    ScenarioInfo{"sec6-feasibility", "device-parameter infidelity budget, both Gamma units",
                 scenario_sec6_feasibility},
    ScenarioInfo{"damping-basis-validate", "eigenelement checks for both dissipators",
                 scenario_damping_basis_validate},
    ScenarioInfo{"heff-consistency", "noise-free Lindblad integration vs C(t), S(t)", scenario_heff_consistency},
    ScenarioInfo{"gate", "four-spin truth table and entangling state", scenario_gate},
    ScenarioInfo{"sweep", "infidelity over an (nbar, alpha, Gamma, gamma) grid", scenario_sweep},
};

}  // namespace

std::span<const ScenarioInfo> scenarios() { return kScenarios; }

const ScenarioInfo* find_scenario(std::string_view name) {
    const auto it = std::find_if(kScenarios.begin(), kScenarios.end(), [&](const auto& s) { return s.name == name; });
    return it == kScenarios.end() ? nullptr : &*it;
}

}  // namespace phonongate::cli
