#include "qedvar/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <thread>

#include "qedvar/error.hpp"
#include "qedvar/oracle.hpp"
#include "qedvar/units.hpp"

namespace qedvar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
MethodResult guarded(Method method, std::size_t modes, F&& body) {
    MethodResult r;
    r.method = method;
    r.modes = modes;
    const auto start = Clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.ok = false;
        r.message = e.what();
        r.levels.clear();
        r.totals.clear();
    }
    r.seconds = seconds_since(start);
    return r;
}

void fill_totals(MethodResult& r) {
    r.totals.clear();
    for (const auto& e : r.levels) r.totals.push_back(e.total);
}

std::shared_ptr<const FockBasis> make_basis(const ScenarioConfig& config) {
    return std::make_shared<const FockBasis>(config.emitter.n_levels(), config.oracle.modes, config.oracle.max_photons,
                                             config.oracle.truncation);
}

MethodResult run_oracle(const ScenarioConfig& config, const std::shared_ptr<const FockBasis>& basis,
                        const MatterEigensystem& matter, const CavityGeometry& cavity, unsigned threads) {
    auto r = guarded(Method::oracle, static_cast<std::size_t>(config.oracle.modes), [&](MethodResult& out) {
        if (!basis) throw Error(ErrorKind::resource, "oracle basis unavailable");
        OracleHamiltonian h(basis, matter, cavity, threads);
        KrylovOptions opt;
        opt.tolerance = config.oracle.tolerance;
        opt.seed = config.seed;
        const std::size_t k = std::min(config.spectrum.levels, h.dimension());
        const auto res = lowest_eigenvalues(h, k, opt);
        out.totals.assign(res.values.data(), res.values.data() + res.values.size());
    });
    r.max_photons = config.oracle.max_photons;
    r.truncation = config.oracle.truncation;
    return r;
}

PointResult solve_point(const ScenarioConfig& config, std::size_t index, double value,
                        const std::shared_ptr<const FockBasis>& basis, unsigned threads) {
    const auto start = Clock::now();
    PointResult p;
    p.index = index;
    p.sweep_value = value;
    try {
        const EmitterSpec emitter = config.emitter_at(value);
        const CavityGeometry cavity = config.cavity_at(value);
        p.coupling = cavity.coupling;
        const MatterEigensystem matter = solve_matter(emitter);
        p.site_length_nm = units::natural_to_nm(matter.site_length);

        const auto m = static_cast<std::size_t>(config.modes);
        const std::size_t m_oracle = config.oracle.enabled ? static_cast<std::size_t>(config.oracle.modes) : 0;
        const InteractingModeSet modes = solve_frequencies(cavity, std::max(m, m_oracle));
        const InteractingModeSet working = modes.truncated(m);
        p.omega1 = modes.omega(0);
        p.bare_omega1 = modes.bare_omega(0);
        const double bare_f1 = bare_profile(cavity, 1, cavity.emitter_position);
        p.suppression = bare_f1 != 0.0 ? modes.profile_at_emitter(0) / bare_f1 : 0.0;
        p.casimir_tail = casimir_energy(working).tail_estimate;

        p.methods.push_back(guarded(Method::variational, m, [&](MethodResult& r) {
            r.levels = spectrum(matter, working, config.spectrum);
            fill_totals(r);
        }));
        p.methods.push_back(guarded(Method::bare_pt, m, [&](MethodResult& r) {
            r.levels = bare_pt_spectrum(matter, cavity, m, config.spectrum);
            fill_totals(r);
        }));
        if (config.oracle.enabled) {
            if (m_oracle != m) {
                const InteractingModeSet matched = modes.truncated(m_oracle);
                p.methods.push_back(guarded(Method::variational, m_oracle, [&](MethodResult& r) {
                    r.levels = spectrum(matter, matched, config.spectrum);
                    fill_totals(r);
                }));
                p.methods.push_back(guarded(Method::bare_pt, m_oracle, [&](MethodResult& r) {
                    r.levels = bare_pt_spectrum(matter, cavity, m_oracle, config.spectrum);
                    fill_totals(r);
                }));
            }
            p.methods.push_back(run_oracle(config, basis, matter, cavity, threads));
        }
    } catch (const std::exception& e) {
        p.ok = false;
        p.message = e.what();
    }
    p.seconds = seconds_since(start);
    return p;
}

std::shared_ptr<const FockBasis> try_basis(const ScenarioConfig& config, std::string& error) {
    if (!config.oracle.enabled) return nullptr;
    try {
        return make_basis(config);
    } catch (const std::exception& e) {
        error = e.what();
        return nullptr;
    }
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
    case Method::variational: return "variational";
    case Method::bare_pt: return "bare_pt";
    case Method::oracle: return "oracle";
    }
    return "unknown";
}

PointResult run_point(const ScenarioConfig& config, std::size_t index, double sweep_value, unsigned threads) {
    std::string error;
    const auto basis = try_basis(config, error);
    auto p = solve_point(config, index, sweep_value, basis, threads);
    for (auto& r : p.methods)
        if (r.method == Method::oracle && !error.empty()) r.message = error;
    return p;
}

ComparisonReport run_sweep(const ScenarioConfig& config, unsigned threads) {
    ComparisonReport report;
    report.config = config;
    const auto values = config.sweep.values();
    report.points.resize(values.size());
    if (values.empty()) return report;

    std::string error;
    const auto basis = try_basis(config, error);
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    const unsigned inner = std::max(1u, threads / workers);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            report.points[i] = solve_point(config, i, values[i], basis, inner);
            for (auto& r : report.points[i].methods)
                if (r.method == Method::oracle && !error.empty()) r.message = error;
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return report;
}

ConvergenceTable convergence_study(const ScenarioConfig& config, std::optional<double> sweep_value,
                                   unsigned threads) {
    ConvergenceTable table;
    const auto values = config.sweep.values();
    table.sweep_value = sweep_value ? *sweep_value : (values.empty() ? config.sweep.to : values.back());

    const EmitterSpec emitter = config.emitter_at(table.sweep_value);
    const CavityGeometry cavity = config.cavity_at(table.sweep_value);
    table.coupling = cavity.coupling;
    const MatterEigensystem matter = solve_matter(emitter);

    const std::size_t m_max = *std::max_element(std::begin(convergence_mode_cutoffs), std::end(convergence_mode_cutoffs));
    const InteractingModeSet all = solve_frequencies(cavity, m_max);
    const std::vector<StateLabel> states{StateLabel{0, {}}, StateLabel{1, {}}};

    for (std::size_t m : convergence_mode_cutoffs) {
        const InteractingModeSet modes = all.truncated(m);
        for (const auto& s : states) {
            for (Method method : {Method::variational, Method::bare_pt}) {
                ConvergenceRow row;
                row.study = "modes";
                row.method = method;
                row.modes = m;
                row.state = s;
                row.level = s.matter;
                try {
                    const EnergyBreakdown e = method == Method::variational
                                                  ? variational_energy(matter, modes, s, config.spectrum.model)
                                                  : bare_pt_energy(matter, cavity, m, s);
                    row.bare_matter = e.bare_matter;
                    row.field_shift = e.field_shift;
                    row.photon = e.photon;
                    row.correlation = e.correlation;
                    row.total = e.total;
                } catch (const std::exception& e) {
                    row.ok = false;
                    row.message = e.what();
                }
                table.rows.push_back(std::move(row));
            }
        }
    }

    if (config.oracle.enabled) {
        for (int cap : convergence_photon_caps) {
            ScenarioConfig c = config;
            c.oracle.max_photons = cap;
            c.spectrum.levels = 2;
            std::string error;
            const auto basis = try_basis(c, error);
            MethodResult r = run_oracle(c, basis, matter, cavity, threads);
            if (!error.empty()) r.message = error;
            for (std::size_t level = 0; level < 2; ++level) {
                ConvergenceRow row;
                row.study = "photons";
                row.method = Method::oracle;
                row.modes = static_cast<std::size_t>(c.oracle.modes);
                row.max_photons = cap;
                row.level = static_cast<int>(level);
                row.ok = r.ok && level < r.totals.size();
                row.message = r.message;
                if (row.ok) row.total = r.totals[level];
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

}  // namespace qedvar
