#include "qedvar/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "qedvar/error.hpp"

namespace qedvar {

namespace {

using nlohmann::ordered_json;

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

class Row {
public:
    Row& add(std::string_view text) {
        cells_.push_back(csv_field(text));
        return *this;
    }
    Row& add(double value) { return add(format_number(value)); }
    Row& add(std::size_t value) { return add(std::to_string(value)); }
    Row& add(int value) { return add(std::to_string(value)); }
    Row& blank() { return add(std::string_view{}); }

    void write(std::ostream& out) const {
        for (std::size_t i = 0; i < cells_.size(); ++i) out << (i ? "," : "") << cells_[i];
        out << '\n';
    }

private:
    std::vector<std::string> cells_;
};

template <std::size_t N>
void header(std::ostream& out, const std::array<std::string_view, N>& columns) {
    Row r;
    for (auto c : columns) r.add(c);
    r.write(out);
}

const MethodResult* matched_oracle(const PointResult& p, std::size_t modes) {
    for (const auto& m : p.methods)
        if (m.method == Method::oracle && m.ok && m.modes == modes) return &m;
    return nullptr;
}

const char* status(bool ok) { return ok ? "ok" : "failed"; }

ordered_json breakdown_json(const EnergyBreakdown& e) {
    return ordered_json{{"state", e.label.to_string()},
                        {"total_eV", e.total},
                        {"bare_matter_eV", e.bare_matter},
                        {"field_shift_eV", e.field_shift},
                        {"photon_eV", e.photon},
                        {"correlation_eV", e.correlation},
                        {"mode_cutoff", e.mode_cutoff},
                        {"cutoff_sensitivity_eV", e.cutoff_sensitivity}};
}

Method method_from_string(const std::string& s) {
    if (s == "variational") return Method::variational;
    if (s == "bare_pt") return Method::bare_pt;
    if (s == "oracle") return Method::oracle;
    throw Error(ErrorKind::io, "unknown method '" + s + "' in report");
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
    return buf;
}

void write_csv(const ComparisonReport& report, std::ostream& out) {
    header(out, csv_columns);
    const std::string parameter = to_string(report.config.sweep.parameter);
    for (const auto& p : report.points) {
        auto lead = [&](Row& r) { r.add(p.index).add(parameter).add(p.sweep_value).add(p.coupling); };
        if (!p.ok) {
            Row r;
            lead(r);
            r.add("point");
            for (int i = 0; i < 14; ++i) r.blank();
            r.add(status(false)).add(p.message);
            r.write(out);
            continue;
        }
        for (const auto& m : p.methods) {
            auto method_cells = [&](Row& r) {
                r.add(to_string(m.method)).add(m.modes);
                if (m.max_photons) r.add(*m.max_photons); else r.blank();
                if (m.truncation) r.add(to_string(*m.truncation)); else r.blank();
            };
            if (!m.ok) {
                Row r;
                lead(r);
                method_cells(r);
                for (int i = 0; i < 9; ++i) r.blank();
                r.add(p.omega1).add(p.suppression).add(status(false)).add(m.message);
                r.write(out);
                continue;
            }
            const MethodResult* oracle = m.method == Method::oracle ? nullptr : matched_oracle(p, m.modes);
            for (std::size_t level = 0; level < m.totals.size(); ++level) {
                Row r;
                lead(r);
                method_cells(r);
                r.add(level);
                if (level < m.levels.size()) {
                    const auto& e = m.levels[level];
                    r.add(e.label.to_string()).add(e.total).add(e.bare_matter).add(e.field_shift).add(e.photon)
                        .add(e.correlation).add(e.cutoff_sensitivity);
                } else {
                    r.blank().add(m.totals[level]).blank().blank().blank().blank().blank();
                }
                if (oracle && level < oracle->totals.size())
                    r.add(m.totals[level] - oracle->totals[level]);
                else
                    r.blank();
                r.add(p.omega1).add(p.suppression).add(status(true)).add(m.message);
                r.write(out);
            }
        }
    }
}

ordered_json to_json(const ComparisonReport& report) {
    ordered_json j;
    j["format"] = "qedvar-report";
    j["version"] = 1;
    j["scenario"] = describe(report.config);
    j["points"] = ordered_json::array();
    for (const auto& p : report.points) {
        ordered_json pj;
        pj["index"] = p.index;
        pj["sweep_value"] = p.sweep_value;
        pj["coupling_eV"] = p.coupling;
        pj["site_length_nm"] = p.site_length_nm;
        pj["omega1_eV"] = p.omega1;
        pj["bare_omega1_eV"] = p.bare_omega1;
        pj["suppression_F1"] = p.suppression;
        pj["casimir_tail_eV"] = p.casimir_tail;
        pj["status"] = status(p.ok);
        pj["message"] = p.message;
        pj["seconds"] = p.seconds;
        pj["methods"] = ordered_json::array();
        for (const auto& m : p.methods) {
            ordered_json mj;
            mj["method"] = to_string(m.method);
            mj["modes"] = m.modes;
            mj["max_photons"] = m.max_photons ? ordered_json(*m.max_photons) : ordered_json(nullptr);
            mj["truncation"] = m.truncation ? ordered_json(to_string(*m.truncation)) : ordered_json(nullptr);
            mj["status"] = status(m.ok);
            mj["message"] = m.message;
            mj["seconds"] = m.seconds;
            mj["totals_eV"] = m.totals;
            mj["levels"] = ordered_json::array();
            for (const auto& e : m.levels) mj["levels"].push_back(breakdown_json(e));
            pj["methods"].push_back(std::move(mj));
        }
        j["points"].push_back(std::move(pj));
    }
    return j;
}

void write_json(const ComparisonReport& report, std::ostream& out) { out << to_json(report).dump(2) << '\n'; }

ComparisonReport read_json(std::istream& in) {
    ComparisonReport report;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& pj : j.at("points")) {
            PointResult p;
            p.index = pj.at("index").get<std::size_t>();
            p.sweep_value = pj.at("sweep_value").get<double>();
            p.coupling = pj.at("coupling_eV").get<double>();
            p.site_length_nm = pj.at("site_length_nm").get<double>();
            p.omega1 = pj.at("omega1_eV").get<double>();
            p.bare_omega1 = pj.at("bare_omega1_eV").get<double>();
            p.suppression = pj.at("suppression_F1").get<double>();
            p.casimir_tail = pj.at("casimir_tail_eV").get<double>();
            p.ok = pj.at("status") == "ok";
            p.message = pj.at("message").get<std::string>();
            p.seconds = pj.at("seconds").get<double>();
            for (const auto& mj : pj.at("methods")) {
                MethodResult m;
                m.method = method_from_string(mj.at("method").get<std::string>());
                m.modes = mj.at("modes").get<std::size_t>();
                if (!mj.at("max_photons").is_null()) m.max_photons = mj.at("max_photons").get<int>();
                if (!mj.at("truncation").is_null())
                    m.truncation = truncation_from_string(mj.at("truncation").get<std::string>());
                m.ok = mj.at("status") == "ok";
                m.message = mj.at("message").get<std::string>();
                m.seconds = mj.at("seconds").get<double>();
                m.totals = mj.at("totals_eV").get<std::vector<double>>();
                for (const auto& ej : mj.at("levels")) {
                    EnergyBreakdown e;
                    e.label = StateLabel::parse(ej.at("state").get<std::string>());
                    e.total = ej.at("total_eV").get<double>();
                    e.bare_matter = ej.at("bare_matter_eV").get<double>();
                    e.field_shift = ej.at("field_shift_eV").get<double>();
                    e.photon = ej.at("photon_eV").get<double>();
                    e.correlation = ej.at("correlation_eV").get<double>();
                    e.mode_cutoff = ej.at("mode_cutoff").get<std::size_t>();
                    e.cutoff_sensitivity = ej.at("cutoff_sensitivity_eV").get<double>();
                    m.levels.push_back(std::move(e));
                }
                p.methods.push_back(std::move(m));
            }
            report.points.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::io, std::string("malformed report: ") + e.what());
    }
    return report;
}

std::vector<std::filesystem::path> emit_report(const ComparisonReport& report, const std::filesystem::path& directory,
                                               OutputFormats formats, const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + directory.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& ext, auto&& writer) {
        const auto path = directory / (stem + ext);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
        writer(out);
        out.close();
        if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
        written.push_back(path);
    };
    if (formats.csv) emit(".csv", [&](std::ostream& o) { write_csv(report, o); });
    if (formats.json) emit(".json", [&](std::ostream& o) { write_json(report, o); });
    return written;
}

void write_csv(const ConvergenceTable& table, std::ostream& out) {
    header(out, convergence_columns);
    for (const auto& row : table.rows) {
        Row r;
        r.add(row.study).add(to_string(row.method)).add(row.modes);
        if (row.max_photons) r.add(*row.max_photons); else r.blank();
        r.add(row.level);
        if (row.method == Method::oracle) r.blank(); else r.add(row.state.to_string());
        if (row.ok && row.method != Method::oracle)
            r.add(row.bare_matter).add(row.field_shift).add(row.photon).add(row.correlation);
        else
            r.blank().blank().blank().blank();
        if (row.ok) r.add(row.total); else r.blank();
        r.add(status(row.ok)).add(row.message);
        r.write(out);
    }
}

ordered_json to_json(const ConvergenceTable& table) {
    ordered_json j;
    j["sweep_value"] = table.sweep_value;
    j["coupling_eV"] = table.coupling;
    j["rows"] = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json rj{{"study", row.study},
                        {"method", to_string(row.method)},
                        {"modes", row.modes},
                        {"max_photons", row.max_photons ? ordered_json(*row.max_photons) : ordered_json(nullptr)},
                        {"level", row.level},
                        {"state", row.method == Method::oracle ? "" : row.state.to_string()},
                        {"bare_matter_eV", row.bare_matter},
                        {"field_shift_eV", row.field_shift},
                        {"photon_eV", row.photon},
                        {"correlation_eV", row.correlation},
                        {"total_eV", row.total},
                        {"status", status(row.ok)},
                        {"message", row.message}};
        j["rows"].push_back(std::move(rj));
    }
    return j;
}

}  // namespace qedvar
