#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qedvar/energies.hpp"
#include "qedvar/scenario.hpp"

namespace qedvar {

enum class Method { variational, bare_pt, oracle };

std::string to_string(Method m);

/// Lowest-k energies of one method at one truncation. Oracle results carry
/// totals only; the other methods carry full breakdowns.
struct MethodResult {
    Method method = Method::variational;
    std::size_t modes = 0;
    std::optional<int> max_photons;        // oracle only
    std::optional<Truncation> truncation;  // oracle only
    bool ok = true;
    std::string message;
    std::vector<EnergyBreakdown> levels;
    std::vector<double> totals;
    double seconds = 0.0;
};

struct PointResult {
    std::size_t index = 0;
    double sweep_value = 0.0;
    double coupling = 0.0;        // lambda, eV
    double site_length_nm = 0.0;
    double omega1 = 0.0;          // lowest interacting frequency, eV
    double bare_omega1 = 0.0;
    double suppression = 1.0;     // F_1(d) / F_1^0(d)
    double casimir_tail = 0.0;    // tail estimate at the working cutoff
    bool ok = true;
    std::string message;
    std::vector<MethodResult> methods;
    double seconds = 0.0;
};

struct ComparisonReport {
    ScenarioConfig config;
    std::vector<PointResult> points;
};

/// Solves one sweep point with every method. Failures are caught per method;
/// a failure before any method runs marks the whole point as failed.
PointResult run_point(const ScenarioConfig& config, std::size_t index, double sweep_value, unsigned threads = 1);

/// All sweep points on a bounded worker pool; results in sweep order.
ComparisonReport run_sweep(const ScenarioConfig& config, unsigned threads = 1);

struct ConvergenceRow {
    std::string study;      // "modes" or "photons"
    Method method = Method::variational;
    std::size_t modes = 0;
    std::optional<int> max_photons;
    StateLabel state;       // level label (oracle: index only)
    int level = 0;
    double bare_matter = 0.0;
    double field_shift = 0.0;
    double photon = 0.0;
    double correlation = 0.0;
    double total = 0.0;
    bool ok = true;
    std::string message;
};

struct ConvergenceTable {
    double sweep_value = 0.0;
    double coupling = 0.0;
    std::vector<ConvergenceRow> rows;
};

inline constexpr std::size_t convergence_mode_cutoffs[] = {10, 20, 50, 100};
inline constexpr int convergence_photon_caps[] = {2, 3, 4};

/// Re-solves one sweep point (the last by default) over the mode cutoffs and,
/// with the oracle enabled, over the photon caps. Rows cover the two lowest
/// bare-vacuum matter states.
ConvergenceTable convergence_study(const ScenarioConfig& config, std::optional<double> sweep_value = {},
                                   unsigned threads = 1);

}  // namespace qedvar
