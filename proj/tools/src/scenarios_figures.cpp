// Figure reproductions: exact vs effective dynamics, drive selectivity and
// the two decoherence channels.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonongate/analytic.hpp"
#include "phonongate/dynamics.hpp"
#include "phonongate/errors.hpp"
#include "phonongate/gate.hpp"
#include "phonongate/model.hpp"
#include "phonongate/cli/scenarios.hpp"
#include "scenario_util.hpp"

namespace phonongate::cli {

using detail::max_abs_difference;
using detail::short_number;
using detail::time_grid;

void scenario_fig2(ScenarioContext& ctx) {
    const auto& c = ctx.config;
    const double alpha = c.number("params.alpha", 1.0 / 40.0);
    const double nbar = c.number("params.nbar", 2.0);
    dynamics::ComparisonOptions opt;
    opt.fock = c.integer("numerics.fock", 60);
    opt.dress_initial_state = c.flag("numerics.dress", false);
    const int points = c.integer("grid.points", 401);
    const double periods = c.number("grid.periods", 1.0);
    const double tol = c.number("tolerances.max_deviation", 0.05);

    const auto params = model::SystemParams::symmetric_spins(alpha, nbar);
    const double tau = analytic::ClosedFormParams::from(params).rabi_period();
    const auto times = time_grid(points, periods, tau);
    const auto cmp = dynamics::exact_vs_effective(params, times, opt);

    auto csv = ctx.csv("fig2.csv", {"t_over_tau", "F_exact", "F_effective"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double row[] = {times[i] / tau, cmp.F_exact[i], cmp.F_effective[i]};
        csv.row(row);
    }

    ctx.report.below("max |F_exact - F_effective|", cmp.max_deviation, tol);
    std::ostringstream os;
    os << "fast-component rms exact " << short_number(cmp.fast_rms_exact) << ", effective "
       << short_number(cmp.fast_rms_effective);
    ctx.report.holds("fast oscillations in exact curve only", cmp.fast_oscillations_exact_only, os.str());
    if (cmp.thermal_tail > 1e-6) {
        ctx.report.warn("thermal weight outside the Fock truncation is " + short_number(cmp.thermal_tail));
    }
}

void scenario_fig3b(ScenarioContext& ctx) {
    const auto& c = ctx.config;
    gate::SelectivityConfig sel;
    sel.alpha = c.number("params.alpha", 1.0 / 40.0);
    sel.nbar = c.number("params.nbar", 2.0);
    sel.suppressed_shift = c.number("params.suppressed_shift", 1.0);
    sel.common_shift = c.number("params.common_shift", 1.0);
    sel.fock = c.integer("numerics.fock", 0);
    const int points = c.integer("grid.points", 401);
    const double periods = c.number("grid.periods", 2.0);
    const double tol_transfer = c.number("tolerances.max_transfer", 1e-3);
    const double tol_resonant = c.number("tolerances.resonant", 1e-6);
    const double tol_common = c.number("tolerances.common_shift", 1e-6);

    const analytic::ClosedFormParams cf{sel.alpha, sel.delta, sel.nbar, 0.0, 0.0};
    const double tau = cf.rabi_period();
    const auto times = time_grid(points, periods, tau);
    const auto r = gate::selectivity_scan(sel, times);
    std::vector<double> analytic_F;
    for (double t : times) analytic_F.push_back(analytic::fidelity_F(t, cf));

    auto csv = ctx.csv("fig3b.csv", {"t_over_tau", "F_resonant", "F_suppressed", "F_common", "F_analytic"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double row[] = {times[i] / tau, r.F_resonant[i], r.F_suppressed[i], r.F_common[i], analytic_F[i]};
        csv.row(row);
    }
    ctx.report.below("suppressed population transfer", r.max_transfer_suppressed, tol_transfer,
                     "DeltaBar_1 = " + short_number(sel.suppressed_shift) + ", DeltaBar_2 = 0");
    ctx.report.below("max |F_resonant - F|", max_abs_difference(r.F_resonant, analytic_F), tol_resonant);
    ctx.report.below("max |F_common - F_resonant|", max_abs_difference(r.F_common, r.F_resonant), tol_common);
}

void scenario_fig4a(ScenarioContext& ctx) {
    const auto& c = ctx.config;
    const double alpha = c.number("params.alpha", 1.0 / 20.0);
    const double nbar = c.number("params.nbar", 2.0);
    const auto rates = c.numbers("params.Gamma", {2.5e-5, 5e-5, 1e-4});
    const int points = c.integer("grid.points", 201);
    const double periods = c.number("grid.periods", 4.0);
    const double fock_tail = c.number("numerics.fock_tail", 1e-10);
    const double integrator_tol = c.number("numerics.tolerance", 1e-8);
    const auto long_numeric = c.numbers("numerics.long_time_numeric", {1e-4});
    const double long_integrator_tol = c.number("numerics.long_time_tolerance", 1e-7);
    const double tol = c.number("tolerances.agreement", 1e-4);
    const double tol_long = c.number("tolerances.long_time", 1e-3);

    const int fock = model::fock_cutoff(nbar, fock_tail);
    const double tau = analytic::ClosedFormParams{alpha, 1.0, nbar, 0.0, 0.0}.rabi_period();
    const auto times = time_grid(points, periods, tau);

    std::vector<std::string> header{"t_over_tau"};
    std::vector<std::vector<double>> cols;
    for (double G : rates) {
        if (!(G > 0.0)) throw ConfigError("fig4a dephasing rates must be positive");
        const analytic::ClosedFormParams p{alpha, 1.0, nbar, G, 0.0};
        std::vector<double> fa;
        for (double t : times) fa.push_back(analytic::fidelity_spin_dephasing(t, p));
        const auto num = detail::evolve_protected(p, times, fock, integrator_tol);
        ctx.report.below("max |F_S analytic - numeric|, Gamma = " + short_number(G), max_abs_difference(fa, num.F),
                         tol);
        header.push_back("F_S_analytic_Gamma_" + short_number(G));
        header.push_back("F_S_numeric_Gamma_" + short_number(G));
        cols.push_back(std::move(fa));
        cols.push_back(num.F);

        const double t_long = 10.0 / G;
        ctx.report.below("|F_S(10/Gamma) - 1/4| analytic, Gamma = " + short_number(G),
                         std::abs(analytic::fidelity_spin_dephasing(t_long, p) - 0.25), tol_long);
    }
    for (double G : long_numeric) {
        const analytic::ClosedFormParams p{alpha, 1.0, nbar, G, 0.0};
        const double t_long = 10.0 / G;
        const std::vector<double> t{0.0, t_long};
        const auto num = detail::evolve_protected(p, t, fock, long_integrator_tol);
        ctx.report.below("|F_S(10/Gamma) - 1/4| numeric, Gamma = " + short_number(G), std::abs(num.F.back() - 0.25),
                         tol_long, std::to_string(num.metadata.steps) + " RK4 steps");
    }

    auto csv = ctx.csv("fig4a.csv", header);
    std::vector<double> row(header.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        row[0] = times[i] / tau;
        for (std::size_t k = 0; k < cols.size(); ++k) row[k + 1] = cols[k][i];
        csv.row(row);
    }
    ctx.report.note("Fock levels " + std::to_string(fock) + " (thermal tail " + short_number(fock_tail) + ")");
}

void scenario_fig4b(ScenarioContext& ctx) {
    const auto& c = ctx.config;
    const double alpha = c.number("params.alpha", 1.0 / 20.0);
    const double nbar = c.number("params.nbar", 2.0);
    const auto rates = c.numbers("params.gamma", {1e-4, 1e-3});
    const int points = c.integer("grid.points", 41);
    const double periods = c.number("grid.periods", 1.0);
    const double fock_tail = c.number("numerics.fock_tail", 1e-8);
    const double integrator_tol = c.number("numerics.tolerance", 1e-8);
    const double tol = c.number("tolerances.agreement", 1e-3);
    const double unity_gamma = c.number("tolerances.unity_gamma", 1e-4);
    const double unity_bound = c.number("tolerances.unity_fidelity", 0.99);

    const int fock = model::fock_cutoff(nbar, fock_tail);
    const double tau = analytic::ClosedFormParams{alpha, 1.0, nbar, 0.0, 0.0}.rabi_period();
    const auto times = time_grid(points, periods, tau);

    std::vector<std::string> header{"t_over_tau"};
    std::vector<std::vector<double>> cols;
    for (double g : rates) {
        if (!(g > 0.0)) throw ConfigError("fig4b damping rates must be positive");
        const analytic::ClosedFormParams p{alpha, 1.0, nbar, 0.0, g};
        std::vector<double> fa;
        for (double t : times) fa.push_back(analytic::fidelity_mech(t, p));
        const auto num = detail::evolve_protected(p, times, fock, integrator_tol);
        ctx.report.below("max |F_M analytic - numeric|, gamma = " + short_number(g), max_abs_difference(fa, num.F),
                         tol);
        if (g <= unity_gamma) {
            ctx.report.above("F_M(tau) analytic, gamma = " + short_number(g), analytic::fidelity_mech(tau, p),
                             unity_bound);
            const double numeric_tau =
                periods == 1.0 ? num.F.back()
                               : detail::evolve_protected(p, std::vector<double>{0.0, tau}, fock, integrator_tol).F.back();
            ctx.report.above("F_M(tau) numeric, gamma = " + short_number(g), numeric_tau, unity_bound);
        }
        header.push_back("F_M_analytic_gamma_" + short_number(g));
        header.push_back("F_M_numeric_gamma_" + short_number(g));
        cols.push_back(std::move(fa));
        cols.push_back(num.F);
    }

    auto csv = ctx.csv("fig4b.csv", header);
    std::vector<double> row(header.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        row[0] = times[i] / tau;
        for (std::size_t k = 0; k < cols.size(); ++k) row[k + 1] = cols[k][i];
        csv.row(row);
    }
    ctx.report.note("Fock levels " + std::to_string(fock) + " (thermal tail " + short_number(fock_tail) + ")");
}

void scenario_heff_consistency(ScenarioContext& ctx) {
    const auto& c = ctx.config;
    const auto alphas = c.numbers("params.alpha", {1.0 / 20.0, 1.0 / 40.0});
    const auto nbars = c.numbers("params.nbar", {0.0, 2.0});
    const int points = c.integer("grid.points", 41);
    const double periods = c.number("grid.periods", 1.0);
    const double fock_tail = c.number("numerics.fock_tail", 1e-10);
    const double integrator_tol = c.number("numerics.tolerance", 1e-8);
    const double tol = c.number("tolerances.agreement", 1e-6);

    auto csv = ctx.csv("heff_consistency.csv",
                       {"alpha", "nbar", "t_over_tau", "C_numeric", "C_analytic", "S_numeric", "S_analytic"});
    for (double alpha : alphas) {
        for (double nbar : nbars) {
            const analytic::ClosedFormParams p{alpha, 1.0, nbar, 0.0, 0.0};
            const double tau = p.rabi_period();
            const auto times = time_grid(points, periods, tau);
            const auto num = detail::evolve_protected(p, times, model::fock_cutoff(nbar, fock_tail), integrator_tol);
            std::vector<double> ca, sa, fa;
            for (double t : times) {
                ca.push_back(analytic::coherence_C(t, p));
                sa.push_back(analytic::coherence_S(t, p));
                fa.push_back(analytic::fidelity_F(t, p));
            }
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double row[] = {alpha, nbar, times[i] / tau, num.C[i], ca[i], num.S[i], sa[i]};
                csv.row(row);
            }
            const std::string tag = "alpha = " + short_number(alpha) + ", nbar = " + short_number(nbar);
            const double dev = std::max({max_abs_difference(num.C, ca), max_abs_difference(num.S, sa),
                                         max_abs_difference(num.F, fa)});
            ctx.report.below("max |numeric - closed form| for C, S, F, " + tag, dev, tol);
        }
    }
}

}  // namespace phonongate::cli
