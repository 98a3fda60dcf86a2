#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qedvar/energies.hpp"
#include "qedvar/matter.hpp"
#include "qedvar/modes.hpp"
#include "qedvar/oracle.hpp"

namespace qedvar {

enum class SweepParameter { charge_scale, emitter_position, cavity_length };

std::string to_string(SweepParameter p);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::charge_scale;
    double from = 0.0;  // charge scale is dimensionless; lengths in nm
    double to = 1.0;
    int points = 20;

    std::vector<double> values() const;
};

struct OracleSpec {
    bool enabled = false;
    int modes = 16;
    int max_photons = 3;
    double tolerance = 1e-10;
    Truncation truncation = Truncation::total;
};

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
};

/// A validated scenario in internal units. Lengths and areas are converted from
/// nm at load time; the sweep range stays in the units of the config file.
struct ScenarioConfig {
    std::string name = "scenario";
    EmitterSpec emitter;
    double length = 0.0;               // 1/eV
    double emitter_position = 0.0;     // 1/eV
    std::optional<double> area;        // 1/eV^2, when the coupling is derived from (q, m, S)
    std::optional<double> coupling;    // lambda in eV, when given directly
    SweepSpec sweep;
    int modes = 50;
    SpectrumOptions spectrum;
    OracleSpec oracle;
    OutputSpec output;
    std::uint64_t seed = 1;

    /// Emitter with the charge scaled when sweeping charge_scale.
    EmitterSpec emitter_at(double sweep_value) const;
    /// Cavity geometry (lambda included) at one sweep value.
    CavityGeometry cavity_at(double sweep_value) const;
};

ScenarioConfig parse_config(const nlohmann::json& document);
/// Reads a JSON scenario file. Throws ConfigError with the field path on failure.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Echo of the config in file units, for reports.
nlohmann::ordered_json describe(const ScenarioConfig& config);

}  // namespace qedvar
