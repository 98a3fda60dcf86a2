#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "qedvar/error.hpp"
#include "qedvar/oracle.hpp"
#include "qedvar/report.hpp"
#include "qedvar/scenario.hpp"
#include "qedvar/sweep.hpp"
#include "qedvar/units.hpp"

namespace fs = std::filesystem;
using namespace qedvar;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string format;
    bool oracle = false;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::optional<double> value;
};

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::invalid_input: return 2;
    case ErrorKind::degenerate:
    case ErrorKind::convergence: return 3;
    case ErrorKind::resource: return 4;
    case ErrorKind::io: return 5;
    }
    return 1;
}

void print_error(const std::string& kind, const std::string& message, const std::string& field = {}) {
    nlohmann::ordered_json j;
    j["error"]["kind"] = kind;
    if (!field.empty()) j["error"]["field"] = field;
    j["error"]["message"] = message;
    std::cerr << j.dump() << '\n';
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QEDVAR_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        throw ConfigError("QEDVAR_THREADS", "must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ScenarioConfig load(const Common& c) {
    ScenarioConfig cfg = load_config(c.config);
    if (c.oracle) cfg.oracle.enabled = true;
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) cfg.output.directory = c.out;
    if (c.format == "csv") {
        cfg.output.csv = true;
        cfg.output.json = false;
    } else if (c.format == "json") {
        cfg.output.csv = false;
        cfg.output.json = true;
    } else if (c.format == "both") {
        cfg.output.csv = cfg.output.json = true;
    }
    return cfg;
}

double point_value(const ScenarioConfig& cfg, const Common& c) {
    if (c.value) return *c.value;
    const auto v = cfg.sweep.values();
    return v.empty() ? cfg.sweep.to : v.back();
}

void announce(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << f.string() << '\n';
}

fs::path open_output(const fs::path& dir, const std::string& name, std::ofstream& out) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
    const fs::path path = dir / name;
    out.open(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    return path;
}

int run_solve(const Common& c) {
    const auto cfg = load(c);
    ComparisonReport report;
    report.config = cfg;
    report.config.sweep.points = 1;
    report.config.sweep.from = report.config.sweep.to = point_value(cfg, c);
    report.points.push_back(run_point(cfg, 0, report.config.sweep.from, resolve_threads(c.threads)));
    announce(emit_report(report, cfg.output.directory, {cfg.output.csv, cfg.output.json}, "solve"));
    return report.points.front().ok ? 0 : 3;
}

int run_sweep_verb(const Common& c) {
    const auto cfg = load(c);
    const auto report = run_sweep(cfg, resolve_threads(c.threads));
    announce(emit_report(report, cfg.output.directory, {cfg.output.csv, cfg.output.json}, "sweep"));
    return 0;
}

int run_converge(const Common& c) {
    const auto cfg = load(c);
    const auto table = convergence_study(cfg, c.value, resolve_threads(c.threads));
    std::vector<fs::path> files;
    if (cfg.output.csv) {
        std::ofstream out;
        files.push_back(open_output(cfg.output.directory, "convergence.csv", out));
        write_csv(table, out);
    }
    if (cfg.output.json) {
        std::ofstream out;
        files.push_back(open_output(cfg.output.directory, "convergence.json", out));
        out << to_json(table).dump(2) << '\n';
    }
    announce(files);
    return 0;
}

int run_oracle_verb(const Common& c) {
    auto cfg = load(c);
    const double value = point_value(cfg, c);
    const auto matter = solve_matter(cfg.emitter_at(value));
    const auto cavity = cfg.cavity_at(value);
    auto basis = std::make_shared<const FockBasis>(cfg.emitter.n_levels(), cfg.oracle.modes, cfg.oracle.max_photons,
                                                   cfg.oracle.truncation);
    OracleHamiltonian h(basis, matter, cavity, resolve_threads(c.threads));
    KrylovOptions opt;
    opt.tolerance = cfg.oracle.tolerance;
    opt.seed = cfg.seed;
    const auto res = lowest_eigenvalues(h, std::min(cfg.spectrum.levels, h.dimension()), opt);

    nlohmann::ordered_json j;
    j["sweep_value"] = value;
    j["coupling_eV"] = cavity.coupling;
    j["modes"] = cfg.oracle.modes;
    j["max_photons"] = cfg.oracle.max_photons;
    j["truncation"] = to_string(cfg.oracle.truncation);
    j["dimension"] = h.dimension();
    j["zero_point_convention_eV"] = zero_point_convention(h);
    j["eigenvalues_eV"] = std::vector<double>(res.values.data(), res.values.data() + res.values.size());
    j["residuals_eV"] = std::vector<double>(res.residuals.data(), res.residuals.data() + res.residuals.size());
    j["iterations"] = res.iterations;
    j["applications"] = res.applications;
    std::vector<fs::path> files;
    if (cfg.output.csv) {
        std::ofstream out;
        files.push_back(open_output(cfg.output.directory, "oracle.csv", out));
        out << "level,energy_eV,residual_eV\n";
        for (Eigen::Index i = 0; i < res.values.size(); ++i)
            out << i << ',' << format_number(res.values[i]) << ',' << format_number(res.residuals[i]) << '\n';
    }
    if (cfg.output.json) {
        std::ofstream out;
        files.push_back(open_output(cfg.output.directory, "oracle.json", out));
        out << j.dump(2) << '\n';
    }
    announce(files);
    return 0;
}

int run_modes(const Common& c, int count, int samples) {
    const auto cfg = load(c);
    const double value = point_value(cfg, c);
    const auto cavity = cfg.cavity_at(value);
    const auto n = static_cast<std::size_t>(count > 0 ? count : cfg.modes);
    const auto modes = solve_frequencies(cavity, n);
    std::vector<fs::path> files;

    std::ofstream freq;
    files.push_back(open_output(cfg.output.directory, "modes.csv", freq));
    freq << "mode,omega_eV,bare_omega_eV,profile_at_emitter,bare_profile_at_emitter,decoupled\n";
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double bare = bare_profile(cavity, static_cast<int>(i) + 1, cavity.emitter_position);
        freq << i + 1 << ',' << format_number(modes.omega(i)) << ',' << format_number(modes.bare_omega(i)) << ','
             << format_number(modes.profile_at_emitter(i)) << ',' << format_number(bare) << ','
             << (modes.decoupled(i) ? 1 : 0) << '\n';
    }

    std::vector<double> z;
    for (int s = 0; s < samples; ++s) z.push_back(cavity.length * s / (samples - 1));
    const double eps = 1e-9 * cavity.length;
    z.push_back(cavity.emitter_position - eps);
    z.push_back(cavity.emitter_position + eps);
    std::sort(z.begin(), z.end());

    std::ofstream prof;
    files.push_back(open_output(cfg.output.directory, "mode_profiles.csv", prof));
    prof << "z_nm";
    for (std::size_t i = 0; i < modes.size(); ++i) prof << ",F" << i + 1;
    prof << '\n';
    for (double x : z) {
        prof << format_number(units::natural_to_nm(x));
        for (std::size_t i = 0; i < modes.size(); ++i) prof << ',' << format_number(modes.profile(i, x));
        prof << '\n';
    }
    announce(files);
    return 0;
}

void add_common(CLI::App* cmd, Common& c, bool with_value) {
    cmd->add_option("--config", c.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "Output directory (overrides the config)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_flag("--oracle", c.oracle, "Enable the exact-diagonalization oracle");
    cmd->add_option("--seed", c.seed, "Random seed for the Krylov start block");
    cmd->add_option("--threads", c.threads, "Worker threads (default: QEDVAR_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    if (with_value) cmd->add_option("--value", c.value, "Sweep-parameter value (default: last sweep point)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational cavity QED energies with perturbative and exact references"};
    app.require_subcommand(1);
    Common common;
    int mode_count = 0;
    int samples = 512;

    auto* solve = app.add_subcommand("solve", "Solve a single sweep point with every method");
    add_common(solve, common, true);
    auto* sweep = app.add_subcommand("sweep", "Run the configured sweep");
    add_common(sweep, common, false);
    auto* converge = app.add_subcommand("converge", "Tabulate energy terms against mode and photon cutoffs");
    add_common(converge, common, true);
    auto* oracle = app.add_subcommand("oracle", "Diagonalize the truncated Fock-space Hamiltonian");
    add_common(oracle, common, true);
    auto* modes = app.add_subcommand("modes", "Dump interacting mode frequencies and profiles");
    add_common(modes, common, true);
    modes->add_option("--count", mode_count, "Number of modes (default: config modes)");
    modes->add_option("--samples", samples, "Uniform samples across the cavity")->check(CLI::Range(2, 1000000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("usage", e.what());
        return 64;
    }

    try {
        if (*solve) return run_solve(common);
        if (*sweep) return run_sweep_verb(common);
        if (*converge) return run_converge(common);
        if (*oracle) return run_oracle_verb(common);
        if (*modes) return run_modes(common, mode_count, samples);
    } catch (const ConfigError& e) {
        print_error(to_string(e.kind()), e.what(), e.field());
        return exit_code(e.kind());
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 1;
}
