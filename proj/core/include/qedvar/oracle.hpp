#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qedvar/matter.hpp"
#include "qedvar/modes.hpp"

namespace qedvar {

/// Photon-number truncation of the oracle's Fock space.
enum class Truncation {
    total,     // sum_i n_i <= P
    per_mode,  // n_i <= P for every mode
};

std::string to_string(Truncation t);
Truncation truncation_from_string(const std::string& name);

/// Product basis |a> (x) |n_1 ... n_M>. Photon occupations are enumerated in
/// ascending lexicographic order (mode 1 most significant); the matter index
/// runs fastest: index = photon_index * n_matter + a.
class FockBasis {
public:
    static constexpr std::size_t default_state_budget = 50'000'000;

    struct Entry {
        std::uint32_t mode;
        std::uint32_t count;
    };

    struct State {
        int matter = 0;
        std::vector<int> occupation;  // dense, length n_modes
    };

    FockBasis(int n_matter, int n_modes, int max_photons, Truncation truncation = Truncation::total,
              std::size_t state_budget = default_state_budget);

    /// Basis size without enumerating; +inf-safe (returns a double).
    static double count_states(int n_matter, int n_modes, int max_photons, Truncation truncation);

    int n_matter() const noexcept { return n_matter_; }
    int n_modes() const noexcept { return n_modes_; }
    int max_photons() const noexcept { return max_photons_; }
    Truncation truncation() const noexcept { return truncation_; }

    std::size_t size() const noexcept { return photon_count() * static_cast<std::size_t>(n_matter_); }
    std::size_t photon_count() const noexcept { return offsets_.size() - 1; }

    State state(std::size_t index) const;
    /// Throws Error(invalid_input) if the state is outside the truncated space.
    std::size_t index_of(int matter, std::span<const int> occupation) const;

    /// Nonzero occupations of photon state j, ascending in mode.
    std::span<const Entry> occupation(std::size_t j) const;
    /// Photon index of (occupation(j) minus one photon in occupation(j)[k].mode).
    std::span<const std::uint32_t> lowered(std::size_t j) const;
    /// Photon index of state j plus one photon in `mode`, or -1 outside the truncation.
    std::int64_t raised(std::size_t j, int mode) const;
    int total_photons(std::size_t j) const noexcept { return totals_[j]; }

private:
    int n_matter_;
    int n_modes_;
    int max_photons_;
    Truncation truncation_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
    std::vector<std::uint32_t> lowered_;
    std::vector<std::uint8_t> totals_;
    std::vector<std::int64_t> raise_row_;    // per photon state: row in raise_table_ or -1
    std::vector<std::int64_t> raise_table_;  // rows of n_modes targets

    std::int64_t lookup(const std::vector<Entry>& sparse) const;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Matrix-free action of the full truncated Hamiltonian
///   H = H_matter + sum_i w_i^0 n_i + sqrt(lambda/m) X p + (lambda/2) X^2,
///   X = sum_i u_i (a_i + a_i^dag),  u_i = F_i^0(d) / sqrt(2 w_i^0),
/// with hard truncation (matrix elements of X^2 between states inside the cap).
/// Basis states with an odd photon number carry a phase i, which makes the
/// operator real symmetric; spectra are unaffected.
class OracleHamiltonian {
public:
    OracleHamiltonian(std::shared_ptr<const FockBasis> basis, const MatterEigensystem& matter,
                      const CavityGeometry& cavity, unsigned threads = 1);

    std::size_t dimension() const noexcept { return basis_->size(); }
    const FockBasis& basis() const noexcept { return *basis_; }
    const CavityGeometry& cavity() const noexcept { return cavity_; }
    std::span<const double> mode_amplitudes() const noexcept { return amplitude_; }
    std::span<const double> bare_omegas() const noexcept { return bare_omega_; }

    void apply(std::span<const double> x, std::span<double> y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    /// Diagonal element of the Fock state `index`.
    double diagonal(std::size_t index) const;

    /// Phase (1 or i) mapping this operator's basis to the untransformed Fock basis.
    bool odd_phase(std::size_t index) const;

private:
    std::shared_ptr<const FockBasis> basis_;
    CavityGeometry cavity_;
    unsigned threads_;
    int n_matter_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd current_;  // kappa = i p, real antisymmetric
    double ap_coupling_;       // sqrt(lambda / m)
    double a2_coupling_;       // lambda / 2
    double a2_constant_;       // (lambda / 2) sum u_i^2
    std::vector<double> amplitude_;
    std::vector<double> bare_omega_;
    std::vector<double> photon_energy_;
};

/// 1/2 sum_{i <= M} w_i^0 for the oracle's modes: adds to Fock eigenvalues to put
/// them on the absolute zero-point scale.
double zero_point_convention(const OracleHamiltonian& hamiltonian);

struct KrylovOptions {
    double tolerance = 1e-10;     // residual |Hv - Ev| <= tol * max(|E|, 1 eV)
    int max_iterations = 2000;
    std::uint64_t seed = 20190401;
    int max_basis = 0;            // 0 -> automatic
    bool want_vectors = false;
};

struct KrylovResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;   // dimension x k when requested
    Eigen::VectorXd residuals;
    int iterations = 0;
    int applications = 0;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// k lowest eigenvalues of a real symmetric operator by thick-restart block
/// Lanczos with full reorthogonalization. Throws Error(convergence) with the
/// residual report when the iteration cap is hit.
KrylovResult lowest_eigenvalues(std::size_t dimension, const LinearOperator& op, std::size_t k,
                                const KrylovOptions& options = {});

KrylovResult lowest_eigenvalues(const OracleHamiltonian& hamiltonian, std::size_t k,
                                const KrylovOptions& options = {});

}  // namespace qedvar
