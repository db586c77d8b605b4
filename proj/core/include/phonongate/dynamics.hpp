#pragma once

// Lindblad propagation of spins (x) oscillator states and observable series.
//
// Generator:
//   d rho/dt = -i[H, rho] + sum_k r_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)
// with spin dephasing (r = Gamma/2, L = sigma_x per spin) and mechanical
// damping (r = gamma(nbar+1), L = a and r = gamma nbar, L = a^dagger).

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "phonongate/hilbert.hpp"
#include "phonongate/model.hpp"

namespace phonongate::dynamics {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

struct SpinDephasing {
    double Gamma = 0.0;
    /// Spin factors to dephase; empty means every factor labelled "spin*".
    std::vector<std::string> spins;
    /// Local jump operator; defaults to sigma_x on a two-level factor.
    std::optional<Matrix> jump;
};

struct MechanicalDamping {
    double gamma = 0.0;
    double nbar = 0.0;
    std::string label = model::kOscLabel;
};

using Dissipator = std::variant<SpinDephasing, MechanicalDamping>;

struct Observable {
    std::string name;
    Operator op;
    bool projector = false;  ///< values must stay in [0, 1] up to 1e-8
};

Observable projector_observable(std::string name, const SpaceLayout& layout, const Matrix& local_projector,
                                std::span<const std::string> labels);

struct EvolutionSpec {
    Operator hamiltonian;
    std::vector<Dissipator> dissipators;
    double t_final = 0.0;
    std::optional<double> dt;         ///< initial step; chosen from the generator norm if absent
    std::vector<Observable> observables;
    std::vector<double> times;        ///< output grid in [0, t_final]; default 101 uniform points
    double tolerance = 1e-8;          ///< max observable change between refinements
    int max_halvings = 12;
    bool keep_states = false;
    bool check_positivity = false;    ///< eigen-decompose each stored state

    void validate() const;
};

struct TrajectoryMetadata {
    int dimension = 0;
    double dt = 0.0;
    int halvings = 0;
    long steps = 0;
    double refinement_change = 0.0;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;      ///< only when check_positivity is set
    std::vector<std::string> notes;
};

struct Trajectory {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> values;
    std::vector<std::string> order;   ///< observable names in spec order
    std::vector<DensityOperator> states;
    TrajectoryMetadata metadata;

    const std::vector<double>& operator[](const std::string& name) const;
};

/// Precomputed sparse form of the generator for repeated right-hand sides.
class LindbladGenerator {
public:
    LindbladGenerator(const Operator& hamiltonian, const std::vector<Dissipator>& dissipators);

    const SpaceLayout& layout() const noexcept { return layout_; }
    int dim() const noexcept { return layout_.dim(); }

    /// Scratch buffers reused across calls of the in-place apply().
    struct Workspace {
        Matrix tmp;
        Matrix lr;
    };

    /// d rho / dt for a raw matrix on the generator's layout.
    Matrix apply(const Matrix& rho) const;
    void apply(const Matrix& rho, Matrix& out, Workspace& ws) const;
    /// Bound on ||L||; used for the automatic initial step.
    double norm_estimate() const noexcept { return norm_; }

private:
    struct Jump {
        double rate;
        SparseMatrix op;
        SparseMatrix adj;
    };
    SpaceLayout layout_;
    SparseMatrix heff_;      // H - (i/2) sum r_k L_k^dagger L_k
    SparseMatrix heff_adj_;
    std::vector<Jump> jumps_;
    double norm_ = 0.0;
};

Operator lindblad_rhs(const DensityOperator& rho, const EvolutionSpec& spec);

Trajectory evolve(const DensityOperator& rho0, const EvolutionSpec& spec);

/// Same result as evolve() when the oscillator is the last factor, the state
/// and observables are diagonal in its number basis and the generator keeps
/// every number level separate (no mechanical damping). Each level is
/// propagated on the spin factors alone and the series are summed with the
/// level populations. Throws ModelError if any of those conditions fails.
Trajectory evolve_number_blocks(const DensityOperator& rho0, const EvolutionSpec& spec);

// ------------------------------------------------------- exact vs effective

struct ComparisonOptions {
    int fock = 60;
    /// Start from exp(-alpha J-) rho0 exp(alpha J-) and measure the dressed
    /// projector, i.e. compare both models in the dispersive frame.
    bool dress_initial_state = false;
    /// Samples per fast period 2 pi / delta used by the oscillation detector.
    int samples_per_fast_period = 16;
};

struct Comparison {
    std::vector<double> times;
    std::vector<double> F_exact;
    std::vector<double> F_effective;
    double max_deviation = 0.0;
    /// RMS of each curve about its running mean over one fast period.
    double fast_rms_exact = 0.0;
    double fast_rms_effective = 0.0;
    bool fast_oscillations_exact_only = false;
    double thermal_tail = 0.0;
};

/// Unitary evolution under the Tavis-Cummings Hamiltonian in the oscillator
/// frame against the closed-form protected-subspace fidelity.
Comparison exact_vs_effective(const model::SystemParams& params, std::span<const double> times,
                              const ComparisonOptions& options = {});

/// RMS deviation of a uniformly sampled series from its centred moving
/// average over `window` samples.
double fast_component_rms(std::span<const double> series, int window);

}  // namespace phonongate::dynamics
