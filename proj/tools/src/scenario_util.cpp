#include "scenario_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "phonongate/errors.hpp"
#include "phonongate/model.hpp"

namespace phonongate::cli::detail {

std::vector<double> time_grid(int points, double periods, double tau) {
    if (points < 2) throw ConfigError("time grids need at least 2 points");
    if (!(periods > 0.0)) throw ConfigError("time grids need a positive number of periods");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = periods * tau * i / (points - 1);
    return t;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw LayoutError("series lengths differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ProtectedRun evolve_protected(const analytic::ClosedFormParams& p, std::span<const double> times, int fock,
                              double tolerance) {
    p.validate();
    if (p.delta != 1.0) throw ParameterError("protected-model runs are set up in units of delta");
    const auto sp = model::SystemParams::symmetric_spins(p.alpha, p.nbar);
    const Operator h = model::heff_protected(sp, fock);
    const auto& layout = h.layout();
    const auto& ps = model::protected_subspace();

    dynamics::EvolutionSpec spec{h, {}, times.back(), std::nullopt, {}, {times.begin(), times.end()}};
    spec.tolerance = tolerance;
    if (p.Gamma > 0.0) spec.dissipators.push_back(dynamics::SpinDephasing{p.Gamma, {}, {}});
    if (p.gamma > 0.0) spec.dissipators.push_back(dynamics::MechanicalDamping{p.gamma, p.nbar, model::kOscLabel});
    spec.observables.push_back({"F", model::embed_two_spin(layout, ps.zero * ps.zero.adjoint()), true});
    spec.observables.push_back({"C", model::embed_two_spin(layout, 0.5 * ps.sz), false});
    spec.observables.push_back({"S", model::embed_two_spin(layout, 0.5 * ps.sy), false});

    const auto rho0 = model::thermal_product_state(layout, ps.zero, p.nbar);
    const auto tr = p.gamma > 0.0 ? dynamics::evolve(rho0, spec) : dynamics::evolve_number_blocks(rho0, spec);
    return {tr["F"], tr["C"], tr["S"], tr.metadata};
}

}  // namespace phonongate::cli::detail
