#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "qedvar/units.hpp"

namespace qedvar {

/// Tight-binding emitter: N_a sites on a chain with one on-site potential per
/// site and a uniform hopping.
struct EmitterSpec {
    std::vector<double> site_potentials{0.0, 0.0};  // eV
    double hopping = -0.25;                          // eV
    std::optional<double> site_length;               // 1/eV; empty -> TRK calibration
    double mass = units::electron_mass_eV;           // eV
    double charge = units::elementary_charge();

    int n_levels() const noexcept { return static_cast<int>(site_potentials.size()); }

    /// Throws Error(invalid_input) on n_levels < 2, t == 0, m <= 0 or R <= 0.
    void validate() const;
};

struct MatterEigensystem {
    Eigen::VectorXd energies;       // ascending, eV
    Eigen::MatrixXd eigenvectors;   // columns, site basis
    Eigen::MatrixXcd momentum;      // p_ab = <a|p|b>, eV
    double site_length = 0.0;       // R used for `momentum`, 1/eV
    double mass = units::electron_mass_eV;

    int size() const noexcept { return static_cast<int>(energies.size()); }
    int ground() const noexcept { return 0; }
};

Eigen::MatrixXd build_matter_hamiltonian(const EmitterSpec& spec);

/// Dense symmetric eigensolve with the sign convention that the
/// largest-magnitude component of each eigenvector is positive.
struct Eigenbasis {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};
Eigenbasis diagonalize_matter(const Eigen::MatrixXd& hamiltonian);

/// p = (-i/R) sum_i (|i><i+1| - |i+1><i|), expressed in the energy eigenbasis.
Eigen::MatrixXcd momentum_matrix(double site_length, const Eigenbasis& basis);

/// (2/m) sum_{i != g} |p_ig|^2 / (E_i - E_g). Throws Error(degenerate) if any
/// E_i is within 1e-10 |E|_max of E_g.
double trk_sum(const MatterEigensystem& system, int ground_index = 0);

/// Site length R that makes trk_sum exactly one. Uses trk_sum(R) = trk_sum(1)/R^2.
double calibrate_site_length(const EmitterSpec& spec);

/// Builds, diagonalizes and (if spec.site_length is empty) calibrates.
MatterEigensystem solve_matter(const EmitterSpec& spec);

}  // namespace qedvar
