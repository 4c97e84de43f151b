#pragma once

// Batch front end: job configuration, the four commands and their
// deterministic CSV / JSON tables.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdm/analytic.hpp"
#include "pdm/oracle.hpp"

namespace pdm::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 2, kValidationFailure = 3, kNumericError = 4 };

enum class Format { Csv, Json };

struct Lattice {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

struct WavefunctionRequest {
    std::optional<QuantumNumbers> level;
    Lattice rho;
    Lattice z;
};

struct JobConfig {
    SystemSpec system;
    LevelRanges ranges;
    OracleConfig oracle;
    double agreement_tol = 1e-5;
    std::optional<WavefunctionRequest> wavefunction;
    std::optional<Format> format;
    /// FNV-1a 64 of the canonical (key-sorted, compact) JSON text.
    std::string hash;
};

/// Parses and validates a configuration document; throws ConfigError.
JobConfig parse_config(const nlohmann::json& doc);
JobConfig parse_config_text(const std::string& text);

std::string fnv1a_hex(const std::string& text);

/// A rendered table: column names plus rows of already-formatted cells;
/// `json_rows` carries the same content with native JSON types.
struct Table {
    std::string command;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json json_rows = nlohmann::json::array();
    nlohmann::json json_extra = nlohmann::json::object();
};

void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);

/// %.17g, or the empty string for an absent value.
std::string format_number(std::optional<double> value);

Table cmd_spectrum(const JobConfig& config);

struct ValidationOutcome {
    Table table;
    int pass = 0;
    int fail = 0;
    int no_root = 0;
    int informational = 0;
    bool ok() const { return fail == 0 && no_root == 0; }
};

ValidationOutcome cmd_validate(const JobConfig& config);

Table cmd_wavefunction(const JobConfig& config, const WavefunctionRequest& request);

Table cmd_heun_terminate(double a_t, double b_t, int n);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace pdm::cli
