#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdm/cli.hpp"
#include "pdm/errors.hpp"

using namespace pdm;
using namespace pdm::cli;

namespace {

std::string config_path(const std::string& name) { return std::string(PDM_CONFIG_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult invoke(std::vector<std::string> args, const std::string& stdin_text = "") {
    args.insert(args.begin(), "pdm-spectra");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json base_config() { return nlohmann::json::parse(read_file(config_path("model1.json"))); }

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("configuration errors map to exit code 2") {
    auto bad_model = base_config();
    bad_model["model"] = "model5";
    CHECK(invoke({"spectrum", "--config", "-"}, bad_model.dump()).code == kConfigError);

    auto unknown = base_config();
    unknown["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);

    auto both = base_config();
    both["field"]["alpha"] = 0.0;
    CHECK_THROWS_AS(parse_config(both), ConfigError);

    auto missing = base_config();
    missing.erase("ranges");
    CHECK_THROWS_AS(parse_config(missing), ConfigError);

    auto mismatch = base_config();
    mismatch["potential"] = {{"type", "killingbeck"}, {"V0", 0}, {"V1", 0}, {"V2", 0}, {"V3", 0}, {"V4", 0}};
    CHECK_THROWS_AS(parse_config(mismatch), ConfigError);

    auto gamma = nlohmann::json::parse(read_file(config_path("model4.json")));
    gamma["field"]["B0"] = 1.0;
    CHECK_THROWS_AS(parse_config(gamma), ConfigError);

    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK(invoke({"spectrum", "--config", config_path("does_not_exist.json")}).code == kConfigError);
    CHECK(invoke({"spectrum"}).code == kConfigError);
    CHECK(invoke({"no-such-command"}).code == kConfigError);
}

TEST_CASE("spectrum of the model I configuration") {
    const auto r = invoke({"spectrum", "--config", config_path("model1.json")});
    REQUIRE(r.code == kOk);
    CHECK(r.out.rfind("# schema_version=1\n", 0) == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 1 + 9);
    CHECK(lines[0].rfind("n_z,m,n_rho,", 0) == 0);
    CHECK(lines[1].rfind("0,1,0,", 0) == 0);

    const auto table = cmd_spectrum(parse_config(base_config()));
    const auto energy_col =
        std::find(table.columns.begin(), table.columns.end(), "energy") - table.columns.begin();
    CHECK(std::stod(table.rows[0][energy_col]) == doctest::Approx(0.944272).epsilon(1e-6));
}

TEST_CASE("empty ranges give a header-only table") {
    auto cfg = base_config();
    cfg["ranges"]["m"] = {3, 1};
    const auto r = invoke({"spectrum", "--config", "-"}, cfg.dump());
    CHECK(r.code == kOk);
    CHECK(data_lines(r.out).size() == 1);
    const auto v = invoke({"validate", "--config", "-"}, cfg.dump());
    CHECK(v.code == kOk);
    CHECK(data_lines(v.out).size() == 1);
}

TEST_CASE("CSV and JSON carry the same rows") {
    const auto table = cmd_spectrum(parse_config(base_config()));
    std::ostringstream csv, json;
    write_csv(table, csv);
    write_json(table, json);
    const auto doc = nlohmann::json::parse(json.str());
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["command"] == "spectrum");
    CHECK(doc["config_hash"] == table.config_hash);
    REQUIRE(doc["rows"].size() == table.rows.size());
    const auto lines = data_lines(csv.str());
    REQUIRE(lines.size() == table.rows.size() + 1);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = doc["rows"][i];
        CHECK(row["n_rho"].get<int>() == std::stoi(table.rows[i][2]));
        if (!row["energy"].is_null()) CHECK(format_number(row["energy"].get<double>()) == table.rows[i][6]);
    }
    const auto r = invoke({"spectrum", "--config", config_path("model1.json"), "--format", "json"});
    CHECK(r.code == kOk);
    CHECK(nlohmann::json::parse(r.out)["rows"].size() == table.rows.size());
}

TEST_CASE("numbers round-trip exactly") {
    for (double x : {0.944272, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_number(x)) == x);
    CHECK(format_number(std::nullopt).empty());
}

TEST_CASE("repeated runs are byte-identical") {
    const auto a = invoke({"spectrum", "--config", config_path("model1.json")});
    const auto b = invoke({"spectrum", "--config", config_path("model1.json")});
    CHECK(a.out == b.out);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    const auto c1 = parse_config(base_config());
    const auto c2 = parse_config_text(read_file(config_path("model1.json")));
    CHECK(c1.hash == c2.hash);
    auto changed = base_config();
    changed["ranges"]["m"] = {1, 2};
    CHECK(parse_config(changed).hash != c1.hash);
}

TEST_CASE("validate model IV") {
    const auto outcome = cmd_validate(parse_config_text(read_file(config_path("model4.json"))));
    const auto& t = outcome.table;
    const auto col = [&](const std::string& name) {
        return std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin();
    };
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][col("status")] == "PASS");
    CHECK(std::abs(std::stod(t.rows[0][col("delta")])) <= 1e-5);
    CHECK(t.rows[1][col("termination_ok")] == "false");
    CHECK(t.rows[1][col("adjudicated")] == "false");
    CHECK(outcome.pass == 1);
    CHECK(outcome.informational == 1);
    CHECK(outcome.ok());
}

TEST_CASE("validate model III without termination is informational") {
    const auto outcome = cmd_validate(parse_config_text(read_file(config_path("model3_v3_zero.json"))));
    const auto& t = outcome.table;
    const auto col = [&](const std::string& name) {
        return std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin();
    };
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][col("termination_ok")] == "false");
    CHECK(t.rows[0][col("adjudicated")] == "false");
    CHECK(outcome.informational == 1);
    CHECK(outcome.ok());
}

TEST_CASE("zero tolerance fails every adjudicated level") {
    auto cfg = base_config();
    cfg["oracle"]["agreement_tol"] = 0.0;
    const auto outcome = cmd_validate(parse_config(cfg));
    CHECK(outcome.pass == 0);
    CHECK(outcome.fail > 0);
    CHECK_FALSE(outcome.ok());
    CHECK(invoke({"validate", "--config", "-"}, cfg.dump()).code == kValidationFailure);
    CHECK(invoke({"validate", "--config", config_path("model1.json")}).code == kOk);
}

TEST_CASE("heun-terminate command") {
    const auto r = invoke({"heun-terminate", "--alpha", "0.5", "--beta", "-3.162278", "--n", "0"});
    REQUIRE(r.code == kOk);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(std::stod(lines[1].substr(0, lines[1].find(','))) == doctest::Approx(4.743417).epsilon(1e-6));
    const auto t = cmd_heun_terminate(1.0, 0.0, 1);
    REQUIRE(t.rows.size() == 2);
    CHECK(std::abs(std::stod(t.rows[0][0])) == doctest::Approx(4.0));
    CHECK(invoke({"heun-terminate", "--alpha", "0.5", "--beta", "0"}).code == kConfigError);
    CHECK(invoke({"heun-terminate", "--alpha", "-2", "--beta", "0", "--n", "0"}).code == kConfigError);
}

TEST_CASE("wavefunction command") {
    const auto r = invoke({"wavefunction", "--config", config_path("constant_mass.json")});
    REQUIRE(r.code == kOk);
    const auto lines = data_lines(r.out);
    CHECK(lines[0] == "rho,z,R,Z,psi_abs2");
    CHECK(lines.size() == 1 + 40 * 8);
    const auto other = invoke({"wavefunction", "--config", config_path("constant_mass.json"), "--level", "0,0,1"});
    CHECK(other.code == kOk);
    CHECK(other.out != r.out);
    CHECK(invoke({"wavefunction", "--config", config_path("constant_mass.json"), "--level", "0,0"}).code ==
          kConfigError);
    CHECK(invoke({"wavefunction", "--config", config_path("model1.json")}).code == kConfigError);
}
