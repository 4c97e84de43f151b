#include <cmath>
#include <cstdio>
#include <set>

#include "pdm/cli.hpp"
#include "pdm/errors.hpp"

namespace pdm::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& required,
                const std::set<std::string>& optional = {}) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!required.count(key) && !optional.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
    for (const auto& key : required)
        if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
    return x;
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<int>();
}

double positive(const json& obj, const std::string& key, const std::string& where) {
    const double x = number(obj, key, where);
    if (!(x > 0.0)) throw ConfigError(where + "." + key + ": must be > 0");
    return x;
}

IndexRange parse_range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
    return {integer(v[0], where + "[0]"), integer(v[1], where + "[1]")};
}

FieldConfig parse_field(const json& obj) {
    check_keys(obj, "field", {"e", "B0"}, {"phi_AB", "alpha"});
    const bool has_flux = obj.contains("phi_AB"), has_alpha = obj.contains("alpha");
    if (has_flux == has_alpha) throw ConfigError("field: give exactly one of phi_AB or alpha");
    const double e = number(obj, "e", "field"), b = number(obj, "B0", "field");
    if (has_flux) return FieldConfig(e, b, number(obj, "phi_AB", "field"));
    return FieldConfig::from_alpha(e, b, number(obj, "alpha", "field"));
}

RadialPotential parse_potential(const json& obj) {
    if (!obj.is_object() || !obj.contains("type") || !obj["type"].is_string())
        throw ConfigError("potential: missing string 'type'");
    const auto type = obj["type"].get<std::string>();
    if (type == "pseudoharmonic") {
        check_keys(obj, "potential", {"type", "V0", "rho0"});
        Pseudoharmonic p{number(obj, "V0", "potential"), number(obj, "rho0", "potential")};
        if (!(p.chemical >= 0.0)) throw ConfigError("potential.V0 must be >= 0");
        if (!(p.rho0 > 0.0)) throw ConfigError("potential.rho0 must be > 0");
        return p;
    }
    if (type == "killingbeck") {
        check_keys(obj, "potential", {"type", "V0", "V1", "V2", "V3", "V4"});
        return Killingbeck{number(obj, "V0", "potential"), number(obj, "V1", "potential"),
                           number(obj, "V2", "potential"), number(obj, "V3", "potential"),
                           number(obj, "V4", "potential")};
    }
    throw ConfigError("potential.type must be 'pseudoharmonic' or 'killingbeck'");
}

ZModel parse_z(const json& obj) {
    if (!obj.is_object() || !obj.contains("type") || !obj["type"].is_string())
        throw ConfigError("z_model: missing string 'type'");
    const auto type = obj["type"].get<std::string>();
    if (type == "well") {
        check_keys(obj, "z_model", {"type", "L"});
        return InfiniteWell{positive(obj, "L", "z_model")};
    }
    if (type == "morse") {
        check_keys(obj, "z_model", {"type", "D", "sigma"});
        return Morse{positive(obj, "D", "z_model"), positive(obj, "sigma", "z_model")};
    }
    if (type == "fixed_kz2") {
        check_keys(obj, "z_model", {"type", "value"});
        return FixedKz2{number(obj, "value", "z_model")};
    }
    throw ConfigError("z_model.type must be 'well', 'morse' or 'fixed_kz2'");
}

void parse_oracle(const json& obj, JobConfig& cfg) {
    check_keys(obj, "oracle", {},
               {"agreement_tol", "eig_tol", "energy_tol", "bracket_expansion_factor", "max_refinements", "n_points",
                "rho_max", "seed"});
    auto& o = cfg.oracle;
    if (obj.contains("agreement_tol")) {
        cfg.agreement_tol = number(obj, "agreement_tol", "oracle");
        if (cfg.agreement_tol < 0.0) throw ConfigError("oracle.agreement_tol must be >= 0");
    }
    if (obj.contains("eig_tol")) o.eig_tol = positive(obj, "eig_tol", "oracle");
    if (obj.contains("energy_tol")) o.energy_tol = positive(obj, "energy_tol", "oracle");
    if (obj.contains("bracket_expansion_factor")) {
        o.bracket_expansion_factor = number(obj, "bracket_expansion_factor", "oracle");
        if (!(o.bracket_expansion_factor > 1.0)) throw ConfigError("oracle.bracket_expansion_factor must be > 1");
    }
    if (obj.contains("max_refinements")) {
        o.max_refinements = integer(obj["max_refinements"], "oracle.max_refinements");
        if (o.max_refinements < 1) throw ConfigError("oracle.max_refinements must be >= 1");
    }
    if (obj.contains("n_points")) {
        o.n_points = integer(obj["n_points"], "oracle.n_points");
        if (o.n_points < 16) throw ConfigError("oracle.n_points must be >= 16");
    }
    if (obj.contains("rho_max")) o.rho_max = positive(obj, "rho_max", "oracle");
    if (obj.contains("seed")) {
        if (!obj["seed"].is_number_unsigned()) throw ConfigError("oracle.seed: expected a non-negative integer");
        o.seed = obj["seed"].get<std::uint64_t>();
    }
}

Lattice parse_lattice(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected [lo, hi, count]");
    if (!v[0].is_number() || !v[1].is_number()) throw ConfigError(where + ": bounds must be numbers");
    Lattice l{v[0].get<double>(), v[1].get<double>(), integer(v[2], where + "[2]")};
    if (l.count < 1) throw ConfigError(where + ": count must be >= 1");
    if (!(l.hi >= l.lo)) throw ConfigError(where + ": hi must be >= lo");
    return l;
}

WavefunctionRequest parse_wavefunction(const json& obj) {
    check_keys(obj, "wavefunction", {"rho"}, {"level", "z"});
    WavefunctionRequest w;
    if (obj.contains("level")) {
        const auto& lv = obj["level"];
        if (!lv.is_array() || lv.size() != 3) throw ConfigError("wavefunction.level: expected [n_rho, m, n_z]");
        w.level = QuantumNumbers{integer(lv[0], "wavefunction.level"), integer(lv[1], "wavefunction.level"),
                                 integer(lv[2], "wavefunction.level")};
    }
    w.rho = parse_lattice(obj["rho"], "wavefunction.rho");
    if (!(w.rho.lo > 0.0)) throw ConfigError("wavefunction.rho: lo must be > 0");
    w.z = obj.contains("z") ? parse_lattice(obj["z"], "wavefunction.z") : Lattice{0.0, 0.0, 1};
    return w;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

JobConfig parse_config(const json& doc) {
    check_keys(doc, "config", {"model", "field", "potential", "z_model", "ranges"},
               {"mass_coefficient", "oracle", "wavefunction", "format"});
    if (!doc["model"].is_string()) throw ConfigError("model: expected a string");
    const auto model = parse_model(doc["model"].get<std::string>());
    if (!model) throw ConfigError("model: unknown model '" + doc["model"].get<std::string>() + "'");

    double coefficient = 1.0;
    if (*model == Model::ConstantMass) {
        if (doc.contains("mass_coefficient")) throw ConfigError("mass_coefficient: not used by constant-mass");
    } else {
        if (!doc.contains("mass_coefficient")) throw ConfigError("config: missing key 'mass_coefficient'");
        coefficient = positive(doc, "mass_coefficient", "config");
    }

    const FieldConfig field = parse_field(doc["field"]);
    const RadialPotential potential = parse_potential(doc["potential"]);
    // Pairing and parameter checks of the radial problem itself.
    make_radial_problem(*model, coefficient, field, potential, 0.0, 0.0);
    if (*model == Model::III || *model == Model::IV) {
        const auto check = heun_constraint_check(field, std::get<Killingbeck>(potential).v2);
        if (!check.pass)
            throw ConfigError("Heun reduction needs e^2 B0^2 / 4 + V2 = 1 (got " + std::to_string(check.gamma_sq) +
                              ")");
    }

    JobConfig cfg{SystemSpec{*model, coefficient, field, potential, parse_z(doc["z_model"])}, {}, {}, 1e-5,
                  std::nullopt, std::nullopt, fnv1a_hex(doc.dump())};

    const auto& ranges = doc["ranges"];
    check_keys(ranges, "ranges", {"n_rho", "m", "n_z"});
    cfg.ranges = {parse_range(ranges["n_rho"], "ranges.n_rho"), parse_range(ranges["m"], "ranges.m"),
                  parse_range(ranges["n_z"], "ranges.n_z")};
    if (cfg.ranges.n_rho.lo < 0 && cfg.ranges.n_rho.lo <= cfg.ranges.n_rho.hi)
        throw ConfigError("ranges.n_rho must be >= 0");
    if (cfg.ranges.n_z.lo < 0 && cfg.ranges.n_z.lo <= cfg.ranges.n_z.hi) throw ConfigError("ranges.n_z must be >= 0");

    if (doc.contains("oracle")) parse_oracle(doc["oracle"], cfg);
    if (doc.contains("wavefunction")) cfg.wavefunction = parse_wavefunction(doc["wavefunction"]);
    if (doc.contains("format")) {
        const auto& f = doc["format"];
        if (f == "csv") cfg.format = Format::Csv;
        else if (f == "json") cfg.format = Format::Json;
        else throw ConfigError("format must be 'csv' or 'json'");
    }
    return cfg;
}

JobConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace pdm::cli
