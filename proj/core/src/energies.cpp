#include "qedvar/energies.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "qedvar/error.hpp"

namespace qedvar {

namespace {

constexpr double resonance_tolerance = 1e-10;  // eV

// Per-mode data entering the A.p shift: frequency and F(d)^2 / (2 w).
struct ModeWeights {
    std::vector<double> omega;
    std::vector<double> weight;
};

ModeWeights interacting_weights(const InteractingModeSet& modes) {
    ModeWeights w;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double f = modes.profile_at_emitter(i);
        w.omega.push_back(modes.omega(i));
        w.weight.push_back(f * f / (2.0 * modes.omega(i)));
    }
    return w;
}

ModeWeights bare_weights(const CavityGeometry& cavity, std::size_t count) {
    ModeWeights w;
    for (std::size_t i = 0; i < count; ++i) {
        const int n = static_cast<int>(i) + 1;
        const double f = bare_profile(cavity, n, cavity.emitter_position);
        const double omega = bare_frequency(cavity, n);
        w.omega.push_back(omega);
        w.weight.push_back(f * f / (2.0 * omega));
    }
    return w;
}

void check_state(const MatterEigensystem& matter, const StateLabel& state, std::size_t mode_count) {
    if (state.matter < 0 || state.matter >= matter.size())
        throw Error(ErrorKind::invalid_input, "matter index out of range in state " + state.to_string());
    if (state.highest_mode() >= static_cast<int>(mode_count))
        throw Error(ErrorKind::invalid_input, "state " + state.to_string() + " occupies a mode beyond the cutoff");
}

[[noreturn]] void throw_resonance(const StateLabel& state, int b, std::size_t mode, double denominator) {
    std::ostringstream msg;
    msg << "state " << state.to_string() << ": resonant second-order term with matter level " << b << " via mode "
        << mode + 1 << " (denominator " << denominator << " eV)";
    throw Error(ErrorKind::degenerate, msg.str());
}

double second_order_shift(const MatterEigensystem& matter, double coupling, const ModeWeights& w,
                          std::size_t mode_count, const StateLabel& state, CorrelationModel model) {
    if (coupling == 0.0) return 0.0;
    const int a = state.matter;
    const double prefactor = coupling / matter.mass;
    const double p_scale = matter.momentum.cwiseAbs2().maxCoeff();

    double shift = 0.0;
    for (std::size_t i = 0; i < mode_count; ++i) {
        if (w.weight[i] == 0.0) continue;
        const int n = model == CorrelationModel::occupation_aware ? state.count_in(static_cast<int>(i)) : 0;
        double mode_sum = 0.0;
        for (int b = 0; b < matter.size(); ++b) {
            if (b == a) continue;
            const double p2 = std::norm(matter.momentum(b, a));
            if (p2 <= 1e-24 * p_scale) continue;
            const double gap = matter.energies(a) - matter.energies(b);
            const double emit = gap - w.omega[i];
            if (std::abs(emit) < resonance_tolerance) throw_resonance(state, b, i, emit);
            double term = (n + 1) / emit;
            if (n > 0) {
                const double absorb = gap + w.omega[i];
                if (std::abs(absorb) < resonance_tolerance) throw_resonance(state, b, i, absorb);
                term += n / absorb;
            }
            mode_sum += p2 * term;
        }
        shift += prefactor * w.weight[i] * mode_sum;
    }
    return shift;
}

double photon_energy(const std::vector<double>& omega, const StateLabel& state) {
    double e = 0.0;
    for (const auto& occ : state.photons) e += occ.count * omega[static_cast<std::size_t>(occ.mode)];
    return e;
}

std::size_t half_cutoff(std::size_t m, const StateLabel& state) {
    return std::max<std::size_t>(std::max<std::size_t>(m / 2, 1), static_cast<std::size_t>(state.highest_mode() + 1));
}

double casimir_partial(const InteractingModeSet& modes, std::size_t count) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += modes.omega(i) - modes.bare_omega(i);
    return 0.5 * sum;
}

double diamagnetic_partial(double coupling, const ModeWeights& w, std::size_t count, const StateLabel& state) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += w.weight[i] * (2.0 * state.count_in(static_cast<int>(i)) + 1.0);
    return 0.5 * coupling * sum;
}

void append_multisets(std::vector<std::vector<int>>& out, std::vector<int>& current, int start, int remaining,
                      int modes) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (int m = start; m < modes; ++m) {
        current.push_back(m);
        append_multisets(out, current, m, remaining - 1, modes);
        current.pop_back();
    }
}

std::vector<EnergyBreakdown> lowest(std::vector<EnergyBreakdown> all, std::size_t levels) {
    std::stable_sort(all.begin(), all.end(),
                     [](const EnergyBreakdown& x, const EnergyBreakdown& y) { return x.total < y.total; });
    if (all.size() > levels) all.resize(levels);
    return all;
}

}  // namespace

int StateLabel::quanta() const noexcept {
    int q = 0;
    for (const auto& p : photons) q += p.count;
    return q;
}

int StateLabel::count_in(int mode) const noexcept {
    for (const auto& p : photons)
        if (p.mode == mode) return p.count;
    return 0;
}

int StateLabel::highest_mode() const noexcept { return photons.empty() ? -1 : photons.back().mode; }

std::string StateLabel::to_string() const {
    std::string s = "a" + std::to_string(matter);
    for (const auto& p : photons) {
        s += '+';
        if (p.count != 1) s += std::to_string(p.count);
        s += 'm' + std::to_string(p.mode + 1);
    }
    return s;
}

StateLabel StateLabel::parse(const std::string& text) {
    auto fail = [&] { return Error(ErrorKind::invalid_input, "malformed state label '" + text + "'"); };
    if (text.size() < 2 || text[0] != 'a') throw fail();
    StateLabel label;
    std::size_t pos = 1;
    auto read_int = [&]() {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw fail();
        return std::stoi(text.substr(start, pos - start));
    };
    label.matter = read_int();
    while (pos < text.size()) {
        if (text[pos] != '+') throw fail();
        ++pos;
        int count = 1;
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) count = read_int();
        if (pos >= text.size() || text[pos] != 'm') throw fail();
        ++pos;
        const int mode = read_int() - 1;
        if (mode < 0 || count < 1 || (!label.photons.empty() && label.photons.back().mode >= mode)) throw fail();
        label.photons.push_back({mode, count});
    }
    return label;
}

CasimirSum casimir_energy(const InteractingModeSet& modes) {
    CasimirSum out;
    out.value = casimir_partial(modes, modes.size());
    const auto& c = modes.cavity();
    const std::size_t m = modes.size();
    for (std::size_t n = m + 1; n <= 2 * m; ++n) {
        const int k = static_cast<int>(n);
        const double s = std::sin(k * std::numbers::pi * c.emitter_position / c.length);
        out.tail_estimate += 0.5 * c.coupling * s * s / (c.length * bare_frequency(c, k));
    }
    return out;
}

double correlation_shift(const MatterEigensystem& matter, const InteractingModeSet& modes, const StateLabel& state,
                         CorrelationModel model) {
    check_state(matter, state, modes.size());
    return second_order_shift(matter, modes.cavity().coupling, interacting_weights(modes), modes.size(), state,
                              model);
}

EnergyBreakdown variational_energy(const MatterEigensystem& matter, const InteractingModeSet& modes,
                                   const StateLabel& state, CorrelationModel model) {
    check_state(matter, state, modes.size());
    const auto w = interacting_weights(modes);
    const double coupling = modes.cavity().coupling;
    const std::size_t m = modes.size();

    EnergyBreakdown e;
    e.label = state;
    e.bare_matter = matter.energies(state.matter);
    e.field_shift = casimir_partial(modes, m);
    e.photon = photon_energy(w.omega, state);
    e.correlation = second_order_shift(matter, coupling, w, m, state, model);
    e.total = e.bare_matter + e.field_shift + e.photon + e.correlation;
    e.mode_cutoff = m;

    const std::size_t half = half_cutoff(m, state);
    const double total_half = e.bare_matter + casimir_partial(modes, half) + e.photon +
                              second_order_shift(matter, coupling, w, half, state, model);
    e.cutoff_sensitivity = std::abs(e.total - total_half);
    return e;
}

EnergyBreakdown bare_pt_energy(const MatterEigensystem& matter, const CavityGeometry& cavity, std::size_t mode_count,
                               const StateLabel& state) {
    cavity.validate();
    check_state(matter, state, mode_count);
    const auto w = bare_weights(cavity, mode_count);
    const double coupling = cavity.coupling;

    EnergyBreakdown e;
    e.label = state;
    e.bare_matter = matter.energies(state.matter);
    e.field_shift = diamagnetic_partial(coupling, w, mode_count, state);
    e.photon = photon_energy(w.omega, state);
    e.correlation =
        second_order_shift(matter, coupling, w, mode_count, state, CorrelationModel::occupation_aware);
    e.total = e.bare_matter + e.field_shift + e.photon + e.correlation;
    e.mode_cutoff = mode_count;

    const std::size_t half = half_cutoff(mode_count, state);
    const double total_half = e.bare_matter + diamagnetic_partial(coupling, w, half, state) + e.photon +
                              second_order_shift(matter, coupling, w, half, state, CorrelationModel::occupation_aware);
    e.cutoff_sensitivity = std::abs(e.total - total_half);
    return e;
}

std::vector<StateLabel> enumerate_states(int n_levels, std::size_t photon_modes, int max_quanta) {
    std::vector<std::vector<int>> multisets;
    std::vector<int> scratch;
    for (int q = 0; q <= max_quanta; ++q)
        append_multisets(multisets, scratch, 0, q, static_cast<int>(photon_modes));

    std::vector<StateLabel> out;
    for (int a = 0; a < n_levels; ++a) {
        for (const auto& ms : multisets) {
            StateLabel label{a, {}};
            for (int mode : ms) {
                if (!label.photons.empty() && label.photons.back().mode == mode)
                    ++label.photons.back().count;
                else
                    label.photons.push_back({mode, 1});
            }
            out.push_back(std::move(label));
        }
    }
    return out;
}

std::vector<EnergyBreakdown> spectrum(const MatterEigensystem& matter, const InteractingModeSet& modes,
                                      const SpectrumOptions& options) {
    if (options.levels == 0) throw Error(ErrorKind::invalid_input, "spectrum needs at least one level");
    const std::size_t photon_modes = std::min(options.photon_modes, modes.size());
    std::vector<EnergyBreakdown> all;
    for (const auto& label : enumerate_states(matter.size(), photon_modes, options.max_quanta))
        all.push_back(variational_energy(matter, modes, label, options.model));
    return lowest(std::move(all), options.levels);
}

std::vector<EnergyBreakdown> bare_pt_spectrum(const MatterEigensystem& matter, const CavityGeometry& cavity,
                                              std::size_t mode_count, const SpectrumOptions& options) {
    if (options.levels == 0) throw Error(ErrorKind::invalid_input, "spectrum needs at least one level");
    const std::size_t photon_modes = std::min(options.photon_modes, mode_count);
    std::vector<EnergyBreakdown> all;
    for (const auto& label : enumerate_states(matter.size(), photon_modes, options.max_quanta))
        all.push_back(bare_pt_energy(matter, cavity, mode_count, label));
    return lowest(std::move(all), options.levels);
}

}  // namespace qedvar
