#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdm/cli.hpp"
#include "pdm/errors.hpp"

namespace pdm::cli {

using nlohmann::json;

namespace {

std::optional<double> finite(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    return x;
}

json to_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string boolean(bool b) { return b ? "true" : "false"; }

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

// Adds one row in both renderings; cells are (column, json value) pairs in
// column order.
void add_row(Table& t, const std::vector<std::pair<std::string, json>>& cells) {
    if (t.columns.empty())
        for (const auto& [name, value] : cells) t.columns.push_back(name);
    std::vector<std::string> row;
    json obj = json::object();
    for (const auto& [name, value] : cells) {
        if (value.is_null()) row.emplace_back();
        else if (value.is_boolean()) row.push_back(boolean(value.get<bool>()));
        else if (value.is_number_integer()) row.push_back(std::to_string(value.get<long long>()));
        else if (value.is_number()) row.push_back(format_number(value.get<double>()));
        else row.push_back(value.get<std::string>());
        obj[name] = value;
    }
    t.rows.push_back(std::move(row));
    t.json_rows.push_back(std::move(obj));
}

Table make_table(const std::string& command, const std::string& hash) {
    Table t;
    t.command = command;
    t.config_hash = hash;
    return t;
}

std::vector<std::pair<std::string, json>> level_cells(const LevelResult& r) {
    return {
        {"n_z", r.qn.n_z},
        {"m", r.qn.m},
        {"n_rho", r.qn.n_rho},
        {"alpha", r.alpha},
        {"m_tilde", r.m_tilde},
        {"kz2", to_json(finite(r.kz2))},
        {"energy", to_json(r.energy)},
        {"energy_paper_literal", to_json(r.energy_paper_literal)},
    };
}

void set_columns(Table& t, std::vector<std::string> columns) {
    if (t.rows.empty()) t.columns = std::move(columns);
}

}  // namespace

std::string format_number(std::optional<double> value) {
    if (!value) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *value);
    return buf;
}

void write_csv(const Table& t, std::ostream& out) {
    out << "# schema_version=" << kSchemaVersion << '\n';
    out << "# config_hash=" << t.config_hash << '\n';
    out << "# command=" << t.command << '\n';
    for (const auto& [key, value] : t.meta) out << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

void write_json(const Table& t, std::ostream& out) {
    json doc = json::object();
    doc["schema_version"] = kSchemaVersion;
    doc["config_hash"] = t.config_hash;
    doc["command"] = t.command;
    doc["columns"] = t.columns;
    json meta = json::object();
    for (const auto& [key, value] : t.meta) meta[key] = value;
    doc["meta"] = meta;
    doc["rows"] = t.json_rows;
    for (const auto& [key, value] : t.json_extra.items()) doc[key] = value;
    out << doc.dump(2) << '\n';
}

Table cmd_spectrum(const JobConfig& config) {
    Table t = make_table("spectrum", config.hash);
    t.meta.emplace_back("model", std::string(model_name(config.system.model)));
    for (const auto& r : spectrum_table(config.system, config.ranges)) {
        auto cells = level_cells(r);
        cells.emplace_back("precondition_ok", r.precondition_ok);
        cells.emplace_back("termination_ok", r.termination_ok);
        cells.emplace_back("normalizable", r.normalizable);
        cells.emplace_back("borderline", r.borderline);
        cells.emplace_back("note", r.note);
        add_row(t, cells);
    }
    set_columns(t, {"n_z", "m", "n_rho", "alpha", "m_tilde", "kz2", "energy", "energy_paper_literal",
                    "precondition_ok", "termination_ok", "normalizable", "borderline", "note"});
    return t;
}

ValidationOutcome cmd_validate(const JobConfig& config) {
    ValidationOutcome v{make_table("validate", config.hash)};
    Table& t = v.table;
    t.meta.emplace_back("model", std::string(model_name(config.system.model)));
    t.meta.emplace_back("agreement_tol", format_number(config.agreement_tol));

    for (const auto& r : spectrum_table(config.system, config.ranges)) {
        const bool adjudicated = r.valid() && r.termination_ok;
        std::optional<double> oracle_e, oracle_err, delta, delta_literal, mismatch;
        std::optional<int> nodes;
        std::string status, detail;
        const double tol = std::max(config.agreement_tol, config.agreement_tol * std::abs(r.energy.value_or(0.0)));

        if (!std::isfinite(r.kz2)) {
            status = "NO-STATE";
        } else {
            const RadialProblem problem = radial_problem(config.system, r);
            const double guess = r.energy.value_or(r.energy_paper_literal.value_or(0.0));
            try {
                const auto refined = richardson_refine(problem, r.qn.n_rho, guess, config.oracle);
                oracle_e = refined.energy;
                oracle_err = refined.error_estimate;
                const auto shot = shooting_check(problem, refined.energy);
                mismatch = shot.mismatch;
                const Grid fine(refined.grid.rho_max, 2 * refined.grid.n + 1);
                const auto op = discretize(problem, refined.fine, fine, Form::U, config.oracle.scheme);
                nodes = count_nodes(eigenvector(op, kth_eigenvalue(op, r.qn.n_rho), config.oracle.seed));
            } catch (const NoRootError& e) {
                detail = e.what();
            }
            if (oracle_e && r.energy) delta = std::abs(*oracle_e - *r.energy);
            if (oracle_e && r.energy_paper_literal) delta_literal = std::abs(*oracle_e - *r.energy_paper_literal);
            if (!oracle_e) status = "NO-ROOT";
            else if (adjudicated) status = *delta <= tol ? "PASS" : "FAIL";
            else if (delta && *delta <= tol) status = "AGREES";
            else status = "ROOT-ELSEWHERE";
        }

        if (adjudicated) {
            if (status == "PASS") ++v.pass;
            else if (status == "FAIL") ++v.fail;
            else ++v.no_root;
        } else {
            ++v.informational;
        }

        std::string note = r.note;
        if (!detail.empty()) note += (note.empty() ? "" : "; ") + detail;
        if (r.model == Model::II && r.valid() && !r.normalizable)
            note += std::string(note.empty() ? "" : "; ") + "not square-integrable under rho drho";

        auto cells = level_cells(r);
        cells.emplace_back("oracle_energy", to_json(oracle_e));
        cells.emplace_back("oracle_error", to_json(oracle_err));
        cells.emplace_back("delta", to_json(delta));
        cells.emplace_back("delta_paper_literal", to_json(delta_literal));
        cells.emplace_back("tolerance", tol);
        cells.emplace_back("precondition_ok", r.precondition_ok);
        cells.emplace_back("termination_ok", r.termination_ok);
        cells.emplace_back("nodes", nodes ? json(*nodes) : json(nullptr));
        cells.emplace_back("shooting_mismatch", to_json(mismatch));
        cells.emplace_back("adjudicated", adjudicated);
        cells.emplace_back("status", status);
        cells.emplace_back("note", note);
        add_row(t, cells);
    }
    set_columns(t, {"n_z", "m", "n_rho", "alpha", "m_tilde", "kz2", "energy", "energy_paper_literal",
                    "oracle_energy", "oracle_error", "delta", "delta_paper_literal", "tolerance", "precondition_ok",
                    "termination_ok", "nodes", "shooting_mismatch", "adjudicated", "status", "note"});
    t.meta.emplace_back("pass", std::to_string(v.pass));
    t.meta.emplace_back("fail", std::to_string(v.fail));
    t.meta.emplace_back("no_root", std::to_string(v.no_root));
    t.meta.emplace_back("informational", std::to_string(v.informational));
    t.json_extra["summary"] = {{"PASS", v.pass}, {"FAIL", v.fail}, {"NO-ROOT", v.no_root},
                               {"informational", v.informational}};
    return v;
}

Table cmd_wavefunction(const JobConfig& config, const WavefunctionRequest& request) {
    if (!request.level) throw ConfigError("wavefunction: no level selected");
    const QuantumNumbers qn = *request.level;
    if (qn.n_rho < 0 || qn.n_z < 0) throw ConfigError("wavefunction: quantum numbers out of range");
    const LevelResult level = total_energy(config.system, qn);
    if (!level.valid()) throw ConfigError("wavefunction: level is not valid (" + level.note + ")");

    const RadialFunction radial(level);
    const RadialProblem problem = radial_problem(config.system, level);
    const double outer = default_grid(problem, *level.energy).rho_max;
    const auto norm_r = normalize_radial([&](double rho) { return radial.R(rho); }, Measure::RhoDRho, 1e-9, outer);
    if (norm_r.degenerate) throw NumericError("wavefunction: radial normalization integral is degenerate");

    double norm_z = 1.0;
    const auto& z = config.system.z;
    if (const auto* w = std::get_if<InfiniteWell>(&z)) {
        norm_z = std::sqrt(2.0 / w->width);
    } else if (const auto* m = std::get_if<Morse>(&z)) {
        const double a = -5.0 / m->range, b = std::log(2.0 * m->depth / 1e-8) / m->range + 5.0 / m->range;
        const auto nz = normalize_radial([&](double x) { return z_eigenfunction(z, qn.n_z, x); }, Measure::DRho, a, b);
        if (nz.degenerate) throw NumericError("wavefunction: z normalization integral is degenerate");
        norm_z = nz.constant;
    }

    Table t = make_table("wavefunction", config.hash);
    t.meta.emplace_back("level", std::to_string(qn.n_rho) + " " + std::to_string(qn.m) + " " + std::to_string(qn.n_z));
    t.meta.emplace_back("energy", format_number(level.energy));
    t.meta.emplace_back("radial_normalization", format_number(norm_r.constant));
    t.meta.emplace_back("z_normalization", format_number(norm_z));
    t.meta.emplace_back("phi", "0");

    auto node = [](const Lattice& l, int i) { return l.count == 1 ? l.lo : l.lo + (l.hi - l.lo) * i / (l.count - 1); };
    for (int i = 0; i < request.rho.count; ++i) {
        const double rho = node(request.rho, i);
        const double r_val = radial.R(rho);
        for (int j = 0; j < request.z.count; ++j) {
            const double zc = node(request.z, j);
            const double z_val = z_eigenfunction(z, qn.n_z, zc);
            const double psi = norm_r.constant * r_val * norm_z * z_val;
            add_row(t, {{"rho", rho}, {"z", zc}, {"R", r_val}, {"Z", z_val}, {"psi_abs2", psi * psi}});
        }
    }
    set_columns(t, {"rho", "z", "R", "Z", "psi_abs2"});
    return t;
}

Table cmd_heun_terminate(double a_t, double b_t, int n) {
    if (!(a_t > -1.0)) throw ConfigError("heun-terminate: alpha~ must exceed -1");
    if (n < 0) throw ConfigError("heun-terminate: n must be >= 0");
    const json args = {{"alpha", a_t}, {"beta", b_t}, {"n", n}};
    Table t = make_table("heun-terminate", fnv1a_hex(args.dump()));
    t.meta.emplace_back("alpha", format_number(a_t));
    t.meta.emplace_back("beta", format_number(b_t));
    t.meta.emplace_back("n", std::to_string(n));
    for (double delta : heun_termination_deltas(a_t, b_t, n)) {
        const auto series = heun_coeffs(HeunParams{a_t, b_t, a_t + 2.0 + 2.0 * n, delta});
        const bool polynomial = series.polynomial_degree && *series.polynomial_degree == n;
        add_row(t, {{"delta", delta}, {"V3", 0.5 * delta}, {"polynomial", polynomial}});
    }
    set_columns(t, {"delta", "V3", "polynomial"});
    return t;
}

namespace {

std::string read_all(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

JobConfig load_config(const std::string& path, std::istream& in) {
    if (path.empty()) throw ConfigError("--config is required for this command");
    if (path == "-") return parse_config_text(read_all(in));
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config_text(read_all(file));
}

QuantumNumbers parse_level(const std::string& text) {
    QuantumNumbers qn;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d%c", &qn.n_rho, &qn.m, &qn.n_z, &extra) != 3)
        throw ConfigError("--level expects n_rho,m,n_z");
    return qn;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectra of a charged particle with position-dependent mass in magnetic and AB fields",
                 "pdm-spectra"};
    app.require_subcommand(1);
    std::string config_path, out_path, format_name, level_text;
    double a_t = 0.0, b_t = 0.0;
    int n = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "configuration file, or - for standard input");
        if (needs_config) opt->required();
        sub->add_option("--out", out_path, "output file (default: standard output)");
        sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto* spectrum = app.add_subcommand("spectrum", "closed-form spectrum table");
    add_common(spectrum, true);
    auto* validate = app.add_subcommand("validate", "closed forms against the numerical oracle");
    add_common(validate, true);
    auto* wave = app.add_subcommand("wavefunction", "sampled eigenfunction of one level");
    add_common(wave, true);
    wave->add_option("--level", level_text, "n_rho,m,n_z (overrides the config selection)");
    auto* heun = app.add_subcommand("heun-terminate", "delta~ values that terminate the H_B series");
    add_common(heun, false);
    heun->add_option("--alpha", a_t, "alpha~")->required();
    heun->add_option("--beta", b_t, "beta~")->required();
    heun->add_option("--n", n, "polynomial degree")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        Table table;
        std::optional<Format> format;
        if (format_name == "csv") format = Format::Csv;
        if (format_name == "json") format = Format::Json;
        int code = kOk;

        if (heun->parsed()) {
            table = cmd_heun_terminate(a_t, b_t, n);
        } else {
            const JobConfig config = load_config(config_path, in);
            if (!format) format = config.format;
            if (spectrum->parsed()) {
                table = cmd_spectrum(config);
            } else if (validate->parsed()) {
                auto outcome = cmd_validate(config);
                table = std::move(outcome.table);
                if (!outcome.ok()) code = kValidationFailure;
            } else {
                WavefunctionRequest request = config.wavefunction.value_or(WavefunctionRequest{});
                if (!level_text.empty()) request.level = parse_level(level_text);
                if (!config.wavefunction) throw ConfigError("wavefunction: config needs a 'wavefunction' section");
                table = cmd_wavefunction(config, request);
            }
        }

        std::ostringstream rendered;
        if (format.value_or(Format::Csv) == Format::Json) write_json(table, rendered);
        else write_csv(table, rendered);
        if (out_path.empty()) {
            out << rendered.str();
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw ConfigError("cannot write output file '" + out_path + "'");
            file << rendered.str();
        }
        if (code == kValidationFailure) err << "validation failed\n";
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    }
}

}  // namespace pdm::cli
