#include "qedvar/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qedvar/error.hpp"
#include "qedvar/units.hpp"

namespace qedvar {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& item : object.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw ConfigError(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
    }
}

const json& require_object(const json& doc, const char* key, const std::string& path) {
    if (!doc.contains(key)) throw ConfigError(path, "missing required section");
    if (!doc.at(key).is_object()) throw ConfigError(path, "must be an object");
    return doc.at(key);
}

double number(const json& obj, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(path, "missing required number");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

int integer(const json& obj, const char* key, const std::string& path, int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
    return v.get<int>();
}

SweepParameter parse_parameter(const std::string& name, const std::string& path) {
    if (name == "charge_scale") return SweepParameter::charge_scale;
    if (name == "emitter_position") return SweepParameter::emitter_position;
    if (name == "cavity_length") return SweepParameter::cavity_length;
    throw ConfigError(path, "unknown sweep parameter '" + name + "' (charge_scale, emitter_position, cavity_length)");
}

}  // namespace

std::string to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::charge_scale: return "charge_scale";
    case SweepParameter::emitter_position: return "emitter_position";
    case SweepParameter::cavity_length: return "cavity_length";
    }
    return "unknown";
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> v;
    if (points <= 0) return v;
    if (points == 1) return {from};
    for (int i = 0; i < points; ++i) v.push_back(from + (to - from) * i / (points - 1));
    v.back() = to;
    return v;
}

EmitterSpec ScenarioConfig::emitter_at(double value) const {
    EmitterSpec e = emitter;
    if (sweep.parameter == SweepParameter::charge_scale) e.charge *= value;
    return e;
}

CavityGeometry ScenarioConfig::cavity_at(double value) const {
    double l = length;
    double d = emitter_position;
    double scale = 1.0;
    switch (sweep.parameter) {
    case SweepParameter::charge_scale: scale = value; break;
    case SweepParameter::emitter_position: d = units::nm_to_natural(value); break;
    case SweepParameter::cavity_length: l = units::nm_to_natural(value); break;
    }
    double lambda = 0.0;
    if (coupling)
        lambda = *coupling * scale * scale;
    else
        lambda = CavityGeometry::from_physical(l, d, *area, emitter.charge * scale, emitter.mass).coupling;
    CavityGeometry c{l, d, lambda};
    c.validate();
    return c;
}

ScenarioConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("$", "scenario must be a JSON object");
    reject_unknown(doc, "", {"name", "emitter", "cavity", "sweep", "modes", "levels", "spectrum", "oracle", "output", "seed"});

    ScenarioConfig cfg;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) throw ConfigError("name", "must be a string");
        cfg.name = doc.at("name").get<std::string>();
    }

    // emitter
    const json empty = json::object();
    const json& em = doc.contains("emitter") ? require_object(doc, "emitter", "emitter") : empty;
    reject_unknown(em, "emitter", {"n_levels", "site_potentials_eV", "hopping_eV", "site_length_nm", "mass_eV", "charge_e"});
    int n_levels = integer(em, "n_levels", "emitter.n_levels", 2);
    if (em.contains("site_potentials_eV")) {
        const auto& v = em.at("site_potentials_eV");
        if (!v.is_array()) throw ConfigError("emitter.site_potentials_eV", "must be an array of numbers");
        cfg.emitter.site_potentials.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError("emitter.site_potentials_eV[" + std::to_string(i) + "]", "must be a number");
            cfg.emitter.site_potentials.push_back(v[i].get<double>());
        }
        if (em.contains("n_levels") && static_cast<int>(cfg.emitter.site_potentials.size()) != n_levels)
            throw ConfigError("emitter.site_potentials_eV", "length must equal n_levels");
    } else {
        if (n_levels < 2) throw ConfigError("emitter.n_levels", "must be at least 2");
        cfg.emitter.site_potentials.assign(static_cast<std::size_t>(n_levels), 0.0);
    }
    if (cfg.emitter.site_potentials.size() < 2) throw ConfigError("emitter.n_levels", "must be at least 2");
    cfg.emitter.hopping = number(em, "hopping_eV", "emitter.hopping_eV", -0.25);
    if (cfg.emitter.hopping == 0.0) throw ConfigError("emitter.hopping_eV", "must be nonzero");
    cfg.emitter.mass = number(em, "mass_eV", "emitter.mass_eV", units::electron_mass_eV);
    if (!(cfg.emitter.mass > 0.0)) throw ConfigError("emitter.mass_eV", "must be positive");
    const double charge_e = number(em, "charge_e", "emitter.charge_e", 1.0);
    cfg.emitter.charge = charge_e * units::elementary_charge();
    if (em.contains("site_length_nm")) {
        const auto& r = em.at("site_length_nm");
        if (r.is_string()) {
            if (r.get<std::string>() != "auto") throw ConfigError("emitter.site_length_nm", "must be \"auto\" or a number");
        } else if (r.is_number()) {
            const double nm = r.get<double>();
            if (!(nm > 0.0)) throw ConfigError("emitter.site_length_nm", "must be positive");
            cfg.emitter.site_length = units::nm_to_natural(nm);
        } else {
            throw ConfigError("emitter.site_length_nm", "must be \"auto\" or a number");
        }
    }

    // cavity
    const json& cav = require_object(doc, "cavity", "cavity");
    reject_unknown(cav, "cavity", {"length_nm", "emitter_position_nm", "area_nm2", "coupling_eV"});
    const double length_nm = number(cav, "length_nm", "cavity.length_nm");
    if (!(length_nm > 0.0)) throw ConfigError("cavity.length_nm", "must be positive");
    const double position_nm = number(cav, "emitter_position_nm", "cavity.emitter_position_nm", 0.5 * length_nm);
    if (!(position_nm > 0.0 && position_nm < length_nm))
        throw ConfigError("emitter_position", "must satisfy 0 < emitter_position_nm < length_nm");
    cfg.length = units::nm_to_natural(length_nm);
    cfg.emitter_position = units::nm_to_natural(position_nm);
    if (cav.contains("coupling_eV")) {
        if (cav.contains("area_nm2") || em.contains("charge_e"))
            throw ConfigError("cavity.coupling_eV",
                              "over-specified coupling: give either coupling_eV or (charge_e, mass_eV, area_nm2)");
        const double lambda = number(cav, "coupling_eV", "cavity.coupling_eV");
        if (!(lambda >= 0.0)) throw ConfigError("cavity.coupling_eV", "must be non-negative");
        cfg.coupling = lambda;
    } else {
        const double area_nm2 = number(cav, "area_nm2", "cavity.area_nm2", 1.0);
        if (!(area_nm2 > 0.0)) throw ConfigError("cavity.area_nm2", "must be positive");
        cfg.area = units::nm2_to_natural(area_nm2);
    }

    // sweep
    if (doc.contains("sweep")) {
        const json& sw = require_object(doc, "sweep", "sweep");
        reject_unknown(sw, "sweep", {"parameter", "from", "to", "points"});
        if (sw.contains("parameter")) {
            if (!sw.at("parameter").is_string()) throw ConfigError("sweep.parameter", "must be a string");
            cfg.sweep.parameter = parse_parameter(sw.at("parameter").get<std::string>(), "sweep.parameter");
        }
        cfg.sweep.from = number(sw, "from", "sweep.from", 0.0);
        cfg.sweep.to = number(sw, "to", "sweep.to", 1.0);
        cfg.sweep.points = integer(sw, "points", "sweep.points", 20);
    }
    if (cfg.sweep.points < 0) throw ConfigError("sweep.points", "must be non-negative");
    for (double v : cfg.sweep.values()) {
        switch (cfg.sweep.parameter) {
        case SweepParameter::charge_scale:
            if (v < 0.0) throw ConfigError("sweep", "charge_scale values must be non-negative");
            break;
        case SweepParameter::emitter_position:
            if (!(v > 0.0 && v < length_nm)) throw ConfigError("emitter_position", "sweep values must lie in (0, length_nm)");
            break;
        case SweepParameter::cavity_length:
            if (!(v > position_nm)) throw ConfigError("cavity_length", "sweep values must exceed emitter_position_nm");
            break;
        }
    }

    cfg.modes = integer(doc, "modes", "modes", 50);
    if (cfg.modes < 1) throw ConfigError("modes", "must be at least 1");
    const int levels = integer(doc, "levels", "levels", 5);
    if (levels < 1) throw ConfigError("levels", "must be at least 1");
    cfg.spectrum.levels = static_cast<std::size_t>(levels);

    if (doc.contains("spectrum")) {
        const json& sp = require_object(doc, "spectrum", "spectrum");
        reject_unknown(sp, "spectrum", {"max_quanta", "photon_modes", "correlation"});
        cfg.spectrum.max_quanta = integer(sp, "max_quanta", "spectrum.max_quanta", 2);
        if (cfg.spectrum.max_quanta < 0) throw ConfigError("spectrum.max_quanta", "must be non-negative");
        const int pm = integer(sp, "photon_modes", "spectrum.photon_modes", 10);
        if (pm < 1) throw ConfigError("spectrum.photon_modes", "must be at least 1");
        cfg.spectrum.photon_modes = static_cast<std::size_t>(pm);
        if (sp.contains("correlation")) {
            const auto& c = sp.at("correlation");
            if (c == "occupation_aware")
                cfg.spectrum.model = CorrelationModel::occupation_aware;
            else if (c == "vacuum")
                cfg.spectrum.model = CorrelationModel::vacuum;
            else
                throw ConfigError("spectrum.correlation", "must be \"occupation_aware\" or \"vacuum\"");
        }
    }

    if (doc.contains("oracle")) {
        const json& orc = require_object(doc, "oracle", "oracle");
        reject_unknown(orc, "oracle", {"enabled", "modes", "max_photons", "tolerance", "truncation"});
        if (orc.contains("enabled")) {
            if (!orc.at("enabled").is_boolean()) throw ConfigError("oracle.enabled", "must be a boolean");
            cfg.oracle.enabled = orc.at("enabled").get<bool>();
        }
        cfg.oracle.modes = integer(orc, "modes", "oracle.modes", 16);
        if (cfg.oracle.modes < 1) throw ConfigError("oracle.modes", "must be at least 1");
        cfg.oracle.max_photons = integer(orc, "max_photons", "oracle.max_photons", 3);
        if (cfg.oracle.max_photons < 0) throw ConfigError("oracle.max_photons", "must be non-negative");
        cfg.oracle.tolerance = number(orc, "tolerance", "oracle.tolerance", 1e-10);
        if (!(cfg.oracle.tolerance > 0.0)) throw ConfigError("oracle.tolerance", "must be positive");
        if (orc.contains("truncation")) {
            try {
                cfg.oracle.truncation = truncation_from_string(orc.at("truncation").get<std::string>());
            } catch (const std::exception& e) {
                throw ConfigError("oracle.truncation", "must be \"total\" or \"per_mode\"");
            }
        }
    }

    if (doc.contains("output")) {
        const json& out = require_object(doc, "output", "output");
        reject_unknown(out, "output", {"directory", "formats"});
        if (out.contains("directory")) {
            if (!out.at("directory").is_string()) throw ConfigError("output.directory", "must be a string");
            cfg.output.directory = out.at("directory").get<std::string>();
        }
        if (out.contains("formats")) {
            const auto& f = out.at("formats");
            if (!f.is_array()) throw ConfigError("output.formats", "must be an array");
            cfg.output.csv = cfg.output.json = false;
            for (const auto& item : f) {
                if (item == "csv")
                    cfg.output.csv = true;
                else if (item == "json")
                    cfg.output.json = true;
                else
                    throw ConfigError("output.formats", "entries must be \"csv\" or \"json\"");
            }
        }
    }

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed", "must be a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }

    try {
        cfg.emitter.validate();
    } catch (const Error& e) {
        throw ConfigError("emitter", e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("parse error: ") + e.what());
    }
    return parse_config(doc);
}

nlohmann::ordered_json describe(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j;
    j["name"] = cfg.name;
    auto& em = j["emitter"];
    em["n_levels"] = cfg.emitter.n_levels();
    em["site_potentials_eV"] = cfg.emitter.site_potentials;
    em["hopping_eV"] = cfg.emitter.hopping;
    if (cfg.emitter.site_length)
        em["site_length_nm"] = units::natural_to_nm(*cfg.emitter.site_length);
    else
        em["site_length_nm"] = "auto";
    em["mass_eV"] = cfg.emitter.mass;
    em["charge_e"] = cfg.emitter.charge / units::elementary_charge();
    auto& cav = j["cavity"];
    cav["length_nm"] = units::natural_to_nm(cfg.length);
    cav["emitter_position_nm"] = units::natural_to_nm(cfg.emitter_position);
    if (cfg.area) cav["area_nm2"] = *cfg.area * units::hbar_c_eV_nm * units::hbar_c_eV_nm;
    if (cfg.coupling) cav["coupling_eV"] = *cfg.coupling;
    j["sweep"] = {{"parameter", to_string(cfg.sweep.parameter)},
                  {"from", cfg.sweep.from},
                  {"to", cfg.sweep.to},
                  {"points", cfg.sweep.points}};
    j["modes"] = cfg.modes;
    j["levels"] = cfg.spectrum.levels;
    j["spectrum"] = {{"max_quanta", cfg.spectrum.max_quanta},
                     {"photon_modes", cfg.spectrum.photon_modes},
                     {"correlation", cfg.spectrum.model == CorrelationModel::vacuum ? "vacuum" : "occupation_aware"}};
    j["oracle"] = {{"enabled", cfg.oracle.enabled},
                   {"modes", cfg.oracle.modes},
                   {"max_photons", cfg.oracle.max_photons},
                   {"tolerance", cfg.oracle.tolerance},
                   {"truncation", to_string(cfg.oracle.truncation)}};
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace qedvar
