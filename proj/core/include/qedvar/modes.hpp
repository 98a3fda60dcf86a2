#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace qedvar {

/// One-dimensional hard-wall cavity [0, L] with a point emitter at d.
/// `coupling` is lambda = q^2 / (m S) in natural units (eV); it sets the
/// strength of the delta-function plasma term and of the A.p interaction.
struct CavityGeometry {
    double length = 0.0;            // L, 1/eV
    double emitter_position = 0.0;  // d, 1/eV
    double coupling = 0.0;          // lambda, eV

    /// lambda = q^2 / (m S); charge in Heaviside-Lorentz units, mass in eV, area in 1/eV^2.
    static CavityGeometry from_physical(double length, double position, double area, double charge, double mass);

    void validate() const;
};

/// omega_n^0 = n pi / L for n >= 1.
double bare_frequency(const CavityGeometry& cavity, int n);
/// sqrt(2/L) sin(n pi z / L).
double bare_profile(const CavityGeometry& cavity, int n, double z);

/// cot(w d) + cot(w (L - d)) + lambda / w. Empty when either sine is below
/// 1e-14 in magnitude (at a pole).
std::optional<double> mode_residual(const CavityGeometry& cavity, double omega);

/// Interacting cavity modes: eigenfunctions of -F'' + lambda delta(z - d) F = w^2 F
/// with F(0) = F(L) = 0. Immutable after construction; profile evaluation is pure.
class InteractingModeSet {
public:
    struct Mode {
        double omega = 0.0;
        double bare_omega = 0.0;
        double norm = 0.0;   // N_n
        double ratio = 0.0;  // sin(w d) / sin(w (L - d)); right-branch amplitude
        bool decoupled = false;
    };

    InteractingModeSet(CavityGeometry cavity, std::vector<Mode> modes);

    const CavityGeometry& cavity() const noexcept { return cavity_; }
    std::size_t size() const noexcept { return modes_.size(); }
    const Mode& mode(std::size_t i) const { return modes_.at(i); }
    const std::vector<Mode>& modes() const noexcept { return modes_; }

    double omega(std::size_t i) const { return modes_.at(i).omega; }
    double bare_omega(std::size_t i) const { return modes_.at(i).bare_omega; }
    bool decoupled(std::size_t i) const { return modes_.at(i).decoupled; }

    /// Normalized profile F_i(z), 0 <= z <= L. Mode i is the (i+1)-th lowest.
    double profile(std::size_t i, double z) const;
    /// F_i(d); exactly zero for decoupled modes.
    double profile_at_emitter(std::size_t i) const;

    /// First `count` modes as a new set (count <= size()).
    InteractingModeSet truncated(std::size_t count) const;

private:
    CavityGeometry cavity_;
    std::vector<Mode> modes_;
};

/// Lowest `count` roots of mode_residual, bracketed between consecutive poles
/// of the two cotangents and refined by bisection. Poles that coincide (to
/// 1e-12 relative) host a decoupled mode pinned at the bare frequency.
InteractingModeSet solve_frequencies(const CavityGeometry& cavity, std::size_t count);

/// Exact normalization 1/sqrt(int_0^L F^2) for the unnormalized two-branch profile.
double profile_normalization(const CavityGeometry& cavity, double omega);

/// The closed form N = 2 / sqrt((1/w)(wL - sin wL)(1 + s^2)) with s the branch ratio.
/// Agrees with profile_normalization only for a centred emitter or lambda = 0.
double printed_normalization(const CavityGeometry& cavity, double omega);

/// Max |G - I| of the Gram matrix of the first `count` profiles (all when 0),
/// integrated with composite Gauss-Legendre split at z = d; panels are doubled
/// until the Gram matrix changes by less than 1e-10.
double verify_orthonormality(const InteractingModeSet& modes, std::size_t count = 0);

}  // namespace qedvar
