#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qedvar/sweep.hpp"

namespace qedvar {

/// Fixed CSV schema: one row per sweep point x method x level. Energies in eV.
inline constexpr std::array<std::string_view, 21> csv_columns{
    "point",          "sweep_parameter",  "sweep_value",         "coupling_eV",         "method",
    "modes",          "max_photons",      "truncation",          "level",               "state",
    "total_eV",       "bare_matter_eV",   "field_shift_eV",      "photon_eV",           "correlation_eV",
    "cutoff_sensitivity_eV", "deviation_from_oracle_eV", "omega1_eV", "suppression_F1", "status",
    "message"};

/// Number formatting used in every CSV cell: 12 significant digits.
std::string format_number(double value);

void write_csv(const ComparisonReport& report, std::ostream& out);

nlohmann::ordered_json to_json(const ComparisonReport& report);
void write_json(const ComparisonReport& report, std::ostream& out);
/// Reads the point data back from write_json output (the scenario echo is not parsed).
ComparisonReport read_json(std::istream& in);

struct OutputFormats {
    bool csv = true;
    bool json = true;
};

/// Writes <directory>/<stem>.csv and/or .json, creating the directory.
/// Returns the written paths. Throws Error(io) on failure.
std::vector<std::filesystem::path> emit_report(const ComparisonReport& report, const std::filesystem::path& directory,
                                               OutputFormats formats, const std::string& stem = "report");

inline constexpr std::array<std::string_view, 13> convergence_columns{
    "study", "method", "modes", "max_photons", "level", "state", "bare_matter_eV", "field_shift_eV",
    "photon_eV", "correlation_eV", "total_eV", "status", "message"};

void write_csv(const ConvergenceTable& table, std::ostream& out);
nlohmann::ordered_json to_json(const ConvergenceTable& table);

}  // namespace qedvar
