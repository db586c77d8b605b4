#pragma once

#include <span>
#include <string>
#include <vector>

#include "phonongate/analytic.hpp"
#include "phonongate/dynamics.hpp"

namespace phonongate::cli::detail {

/// points >= 2 samples of [0, periods * tau].
std::vector<double> time_grid(int points, double periods, double tau);

/// Compact "%g" rendering for column names and messages.
std::string short_number(double v);

double max_abs_difference(std::span<const double> a, std::span<const double> b);

struct ProtectedRun {
    std::vector<double> F;  ///< population of |0>
    std::vector<double> C;  ///< <sz>/2
    std::vector<double> S;  ///< <sy>/2
    dynamics::TrajectoryMetadata metadata;
};

/// Lindblad evolution of |0><0| (x) thermal under the protected effective
/// Hamiltonian with the rates in `p`, on `fock` oscillator levels.
ProtectedRun evolve_protected(const analytic::ClosedFormParams& p, std::span<const double> times, int fock,
                              double tolerance);

}  // namespace phonongate::cli::detail
