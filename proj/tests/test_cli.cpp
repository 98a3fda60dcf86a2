#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qedvar/error.hpp"
#include "qedvar/report.hpp"
#include "qedvar/scenario.hpp"
#include "qedvar/sweep.hpp"
#include "qedvar/units.hpp"

using namespace qedvar;
using nlohmann::json;

namespace {

std::string config_error_field(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

json small_scenario() {
    return json::parse(R"({
        "emitter": {"n_levels": 2, "hopping_eV": -0.25},
        "cavity": {"length_nm": 620, "emitter_position_nm": 186},
        "sweep": {"parameter": "charge_scale", "from": 0, "to": 5, "points": 4},
        "modes": 20,
        "oracle": {"enabled": true, "modes": 6, "max_photons": 2}
    })");
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(cell);
            cell.clear();
        } else if (c == '\n') {
            row.push_back(cell);
            rows.push_back(row);
            row.clear();
            cell.clear();
        } else {
            cell += c;
        }
    }
    return rows;
}

std::string csv_of(const ComparisonReport& r) {
    std::ostringstream out;
    write_csv(r, out);
    return out.str();
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
    const auto cfg = parse_config(json::parse(R"({"cavity": {"length_nm": 620}})"));
    EXPECT_EQ(cfg.modes, 50);
    EXPECT_FALSE(cfg.oracle.enabled);
    EXPECT_EQ(cfg.sweep.parameter, SweepParameter::charge_scale);
    EXPECT_EQ(cfg.sweep.from, 0.0);
    EXPECT_EQ(cfg.sweep.to, 1.0);
    EXPECT_EQ(cfg.sweep.points, 20);
    EXPECT_EQ(cfg.emitter.n_levels(), 2);
    EXPECT_FALSE(cfg.emitter.site_length.has_value());
    EXPECT_NEAR(cfg.length, 620 / units::hbar_c_eV_nm, 1e-12);
    EXPECT_NEAR(cfg.emitter_position, 0.5 * cfg.length, 1e-12);
    EXPECT_EQ(cfg.spectrum.levels, 5u);
    const auto values = cfg.sweep.values();
    ASSERT_EQ(values.size(), 20u);
    EXPECT_EQ(values.front(), 0.0);
    EXPECT_EQ(values.back(), 1.0);
}

TEST(Config, ChargeSweepEndpointIsConfiguredCharge) {
    const auto cfg = parse_config(json::parse(R"({"emitter": {"charge_e": 2}, "cavity": {"length_nm": 620}})"));
    const auto c = cfg.cavity_at(1.0);
    const double q = 2 * units::elementary_charge();
    EXPECT_NEAR(c.coupling, q * q / (units::electron_mass_eV * units::nm2_to_natural(1.0)), 1e-15);
    EXPECT_EQ(cfg.cavity_at(0.0).coupling, 0.0);
    EXPECT_NEAR(cfg.cavity_at(0.5).coupling, 0.25 * c.coupling, 1e-15);
}

TEST(Config, ValidationNamesTheField) {
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620, "emitter_position_nm": 620}})")),
              "emitter_position");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620, "emitter_position_nm": 700}})")),
              "emitter_position");
    EXPECT_EQ(config_error_field(json::parse(R"({"emitter": {"charge_e": 1}, "cavity": {"length_nm": 620, "coupling_eV": 0.1}})")),
              "cavity.coupling_eV");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620, "area_nm2": 1, "coupling_eV": 0.1}})")),
              "cavity.coupling_eV");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": -1}})")), "cavity.length_nm");
    EXPECT_EQ(config_error_field(json::parse(R"({})")), "cavity");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620}, "colour": 1})")), "colour");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620}, "sweep": {"parameter": "mass"}})")),
              "sweep.parameter");
    EXPECT_EQ(config_error_field(json::parse(
                  R"({"cavity": {"length_nm": 620}, "sweep": {"parameter": "emitter_position", "from": 10, "to": 650}})")),
              "emitter_position");
    EXPECT_EQ(config_error_field(json::parse(R"({"emitter": {"n_levels": 3, "site_potentials_eV": [0, 0]}, "cavity": {"length_nm": 620}})")),
              "emitter.site_potentials_eV");
    EXPECT_EQ(config_error_field(json::parse(R"({"cavity": {"length_nm": 620}, "oracle": {"truncation": "none"}})")),
              "oracle.truncation");
}

TEST(Config, DirectCouplingScalesWithChargeSquared) {
    const auto cfg = parse_config(json::parse(R"({"cavity": {"length_nm": 620, "coupling_eV": 0.2}})"));
    EXPECT_NEAR(cfg.cavity_at(0.5).coupling, 0.05, 1e-15);
}

TEST(Config, GeometrySweeps) {
    const auto pos = parse_config(json::parse(
        R"({"cavity": {"length_nm": 620}, "sweep": {"parameter": "emitter_position", "from": 100, "to": 300, "points": 3}})"));
    EXPECT_NEAR(pos.cavity_at(200).emitter_position, units::nm_to_natural(200), 1e-12);
    const auto len = parse_config(json::parse(
        R"({"cavity": {"length_nm": 620, "emitter_position_nm": 100}, "sweep": {"parameter": "cavity_length", "from": 300, "to": 900, "points": 3}})"));
    EXPECT_NEAR(len.cavity_at(300).length, units::nm_to_natural(300), 1e-12);
    EXPECT_THROW(parse_config(json::parse(
                     R"({"cavity": {"length_nm": 620, "emitter_position_nm": 400}, "sweep": {"parameter": "cavity_length", "from": 300, "to": 900}})")),
                 ConfigError);
}

TEST(Sweep, UncoupledEndpointAgreesAcrossMethods) {
    const auto cfg = parse_config(small_scenario());
    const auto p = run_point(cfg, 0, 0.0);
    ASSERT_TRUE(p.ok) << p.message;
    const MethodResult* oracle = nullptr;
    for (const auto& m : p.methods)
        if (m.method == Method::oracle) oracle = &m;
    ASSERT_NE(oracle, nullptr);
    ASSERT_TRUE(oracle->ok) << oracle->message;
    for (const auto& m : p.methods) {
        ASSERT_TRUE(m.ok) << m.message;
        ASSERT_EQ(m.totals.size(), 5u);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(m.totals[i], oracle->totals[i], 1e-9);
    }
}

TEST(Sweep, DecouplingDiagnosticsAreMonotone) {
    auto doc = small_scenario();
    doc["oracle"]["enabled"] = false;
    doc["sweep"]["points"] = 8;
    const auto report = run_sweep(parse_config(doc), 2);
    ASSERT_EQ(report.points.size(), 8u);
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        EXPECT_GE(report.points[i].omega1, report.points[i - 1].omega1);
        EXPECT_LE(std::abs(report.points[i].suppression), std::abs(report.points[i - 1].suppression));
    }
    EXPECT_GT(report.points.back().omega1, report.points.back().bare_omega1);
}

TEST(Sweep, MethodRowsCarryTheirTruncation) {
    const auto report = run_sweep(parse_config(small_scenario()));
    for (const auto& p : report.points) {
        ASSERT_TRUE(p.ok);
        for (const auto& m : p.methods) {
            EXPECT_EQ(m.max_photons.has_value(), m.method == Method::oracle);
            for (const auto& e : m.levels) EXPECT_EQ(e.mode_cutoff, m.modes);
        }
    }
}

TEST(Sweep, FailuresAreRecordedAndTheRunContinues) {
    auto doc = small_scenario();
    doc["oracle"]["modes"] = 400;
    doc["oracle"]["max_photons"] = 6;
    const auto report = run_sweep(parse_config(doc));
    ASSERT_EQ(report.points.size(), 4u);
    for (const auto& p : report.points) {
        bool oracle_failed = false;
        for (const auto& m : p.methods) {
            if (m.method == Method::oracle) {
                oracle_failed = !m.ok;
                EXPECT_NE(m.message.find("budget"), std::string::npos) << m.message;
            } else {
                EXPECT_TRUE(m.ok);
            }
        }
        EXPECT_TRUE(oracle_failed);
    }
    const auto rows = parse_csv(csv_of(report));
    int failed = 0;
    for (const auto& r : rows)
        if (r[19] == "failed") ++failed;
    EXPECT_EQ(failed, 4);
}

TEST(Report, EmptySweepGivesHeaderOnlyCsv) {
    auto doc = small_scenario();
    doc["sweep"]["points"] = 0;
    const auto text = csv_of(run_sweep(parse_config(doc)));
    const auto rows = parse_csv(text);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].size(), csv_columns.size());
    EXPECT_EQ(rows[0][0], "point");
}

TEST(Report, EveryRowHasTheFixedSchema) {
    const auto report = run_sweep(parse_config(small_scenario()));
    const auto rows = parse_csv(csv_of(report));
    ASSERT_GT(rows.size(), 1u);
    for (std::size_t c = 0; c < csv_columns.size(); ++c) EXPECT_EQ(rows[0][c], csv_columns[c]);
    for (const auto& r : rows) EXPECT_EQ(r.size(), csv_columns.size());
    // deviation column filled only where the truncation matches the oracle's
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool matched = rows[i][5] == "6" && rows[i][4] != "oracle";
        EXPECT_EQ(!rows[i][16].empty(), matched) << i;
    }
}

TEST(Report, NumbersUseTwelveSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1234567.890123456), "1234567.89012");
}

TEST(Report, JsonRoundTripIsExact) {
    const auto report = run_sweep(parse_config(small_scenario()));
    std::stringstream buffer;
    write_json(report, buffer);
    const auto back = read_json(buffer);
    ASSERT_EQ(back.points.size(), report.points.size());
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& a = report.points[i];
        const auto& b = back.points[i];
        EXPECT_EQ(a.omega1, b.omega1);
        EXPECT_EQ(a.suppression, b.suppression);
        ASSERT_EQ(a.methods.size(), b.methods.size());
        for (std::size_t m = 0; m < a.methods.size(); ++m) {
            EXPECT_EQ(a.methods[m].totals, b.methods[m].totals);
            ASSERT_EQ(a.methods[m].levels.size(), b.methods[m].levels.size());
            for (std::size_t l = 0; l < a.methods[m].levels.size(); ++l) {
                EXPECT_EQ(a.methods[m].levels[l].label, b.methods[m].levels[l].label);
                EXPECT_EQ(a.methods[m].levels[l].correlation, b.methods[m].levels[l].correlation);
                EXPECT_EQ(a.methods[m].levels[l].total, b.methods[m].levels[l].total);
            }
        }
    }
}

TEST(Report, CsvIsIndependentOfThreadCount) {
    const auto cfg = parse_config(small_scenario());
    const auto one = csv_of(run_sweep(cfg, 1));
    EXPECT_EQ(one, csv_of(run_sweep(cfg, 1)));
    EXPECT_EQ(one, csv_of(run_sweep(cfg, 3)));
}

TEST(Convergence, UncoupledRowsAreIdentical) {
    auto doc = small_scenario();
    doc["sweep"]["to"] = 0.0;
    const auto table = convergence_study(parse_config(doc));
    for (const auto& row : table.rows) {
        ASSERT_TRUE(row.ok) << row.message;
        for (const auto& other : table.rows)
            if (other.level == row.level) {
                if (row.method == Method::oracle || other.method == Method::oracle)
                    EXPECT_NEAR(row.total, other.total, 1e-9);
                else
                    EXPECT_DOUBLE_EQ(row.total, other.total);
            }
    }
}

TEST(Convergence, CorrelationIncrementsShrink) {
    auto doc = small_scenario();
    doc["oracle"]["enabled"] = false;
    const auto table = convergence_study(parse_config(doc));
    for (int level : {0, 1}) {
        std::map<std::size_t, double> c;
        std::map<std::size_t, double> casimir;
        for (const auto& row : table.rows)
            if (row.study == "modes" && row.method == Method::variational && row.level == level) {
                c[row.modes] = row.correlation;
                casimir[row.modes] = row.field_shift;
            }
        ASSERT_EQ(c.size(), 4u);
        EXPECT_LE(std::abs(c[100] - c[50]), 0.5 * std::abs(c[20] - c[10])) << level;
        EXPECT_GT(casimir[100], casimir[50]);
    }
}

TEST(Convergence, PhotonCapRowsWithOracle) {
    const auto table = convergence_study(parse_config(small_scenario()));
    std::vector<int> caps;
    for (const auto& row : table.rows)
        if (row.study == "photons") {
            ASSERT_TRUE(row.ok) << row.message;
            if (row.level == 0) caps.push_back(*row.max_photons);
        }
    EXPECT_EQ(caps, (std::vector<int>{2, 3, 4}));
}
