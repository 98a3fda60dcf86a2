#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qedvar/matter.hpp"
#include "qedvar/modes.hpp"

namespace qedvar {

struct PhotonOccupation {
    int mode = 0;   // 0-based mode index
    int count = 1;

    friend bool operator==(const PhotonOccupation&, const PhotonOccupation&) = default;
};

/// Matter level `matter` (0 = ground) dressed with photon quasiparticles.
/// Photons are kept sorted by mode with positive counts.
struct StateLabel {
    int matter = 0;
    std::vector<PhotonOccupation> photons;

    int quanta() const noexcept;
    int count_in(int mode) const noexcept;
    int highest_mode() const noexcept;  // -1 when no photons

    /// "a0", "a1+m1", "a0+2m1", "a0+m1+m3" (modes printed 1-based).
    std::string to_string() const;
    static StateLabel parse(const std::string& text);

    friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// How the correlation shift treats photons already present in the state.
enum class CorrelationModel {
    occupation_aware,  // (n_i + 1) emission and n_i absorption factors
    vacuum,            // every state corrected as if the photon sector were empty
};

/// Energy of one state, split into its parts. For the variational method
/// `field_shift` is the Casimir term 1/2 sum (w_n - w_n^0); for bare
/// perturbation theory it is the first-order A^2 shift.
struct EnergyBreakdown {
    StateLabel label;
    double bare_matter = 0.0;
    double field_shift = 0.0;
    double photon = 0.0;
    double correlation = 0.0;
    double total = 0.0;
    std::size_t mode_cutoff = 0;
    double cutoff_sensitivity = 0.0;  // |total(M) - total(M/2)|
};

struct CasimirSum {
    double value = 0.0;
    /// First-order asymptotic estimate of the change if the cutoff were doubled.
    double tail_estimate = 0.0;
};

CasimirSum casimir_energy(const InteractingModeSet& modes);

/// Second-order A.p shift evaluated with interacting modes and frequencies.
/// Throws Error(degenerate) naming the pair if a denominator vanishes (< 1e-10 eV).
double correlation_shift(const MatterEigensystem& matter, const InteractingModeSet& modes, const StateLabel& state,
                         CorrelationModel model = CorrelationModel::occupation_aware);

EnergyBreakdown variational_energy(const MatterEigensystem& matter, const InteractingModeSet& modes,
                                   const StateLabel& state,
                                   CorrelationModel model = CorrelationModel::occupation_aware);

/// Perturbation theory in the bare matter and photon states with the first
/// `mode_count` bare modes.
EnergyBreakdown bare_pt_energy(const MatterEigensystem& matter, const CavityGeometry& cavity, std::size_t mode_count,
                               const StateLabel& state);

struct SpectrumOptions {
    std::size_t levels = 5;
    int max_quanta = 2;            // total photon quasiparticles per candidate
    std::size_t photon_modes = 10; // candidates occupy only the lowest modes
    CorrelationModel model = CorrelationModel::occupation_aware;
};

/// All candidate labels: every matter level with up to `max_quanta` photons
/// over the lowest `photon_modes` modes, in a fixed order.
std::vector<StateLabel> enumerate_states(int n_levels, std::size_t photon_modes, int max_quanta);

/// Lowest `levels` variational energies, ascending (ties broken by enumeration order).
std::vector<EnergyBreakdown> spectrum(const MatterEigensystem& matter, const InteractingModeSet& modes,
                                      const SpectrumOptions& options = {});

std::vector<EnergyBreakdown> bare_pt_spectrum(const MatterEigensystem& matter, const CavityGeometry& cavity,
                                              std::size_t mode_count, const SpectrumOptions& options = {});

}  // namespace qedvar
