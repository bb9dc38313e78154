#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "tra/physics.hpp"

namespace tra::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct Grid {
    double start = 0.0, stop = 0.0;
    int count = 1;
    bool operator==(const Grid&) const = default;
};

Grid parse_grid(const std::string& s);
std::vector<double> grid_points(const Grid& g);

struct JobConfig {
    std::string command;
    std::string model;    // exactly one of model / family for most commands
    std::string family;
    std::string route;    // empty selects the model's default
    std::map<std::string, double> params;
    int M = 0;            // 0 selects the command default
    int kmax = -1;
    int nmax = -1;
    std::optional<Grid> grid;
    std::string level;    // wavefunction: "k=<int>" or "E=<value>"
    bool fit = false;
    std::map<std::string, double> tol;
    std::string format = "json";
    std::string out;
    bool reproducible = false;
    std::uint64_t seed = 0;
    bool operator==(const JobConfig&) const = default;
};

/// Parses "k=v"; the value must be a finite number.
std::pair<std::string, double> parse_param(const std::string& kv);

/// Fills command defaults (route, M, kmax, nmax, tolerances) and validates ranges and keys.
JobConfig resolve(JobConfig c);

json config_to_json(const JobConfig& c);
JobConfig config_from_json(const json& j);

PotentialModel make_model(const std::string& name, const std::map<std::string, double>& params);
FamilyParams make_family(const std::string& name, const std::map<std::string, double>& params);

/// Runs a resolved job and returns {schema_version, command, inputs, results, diagnostics}.
json run_job(const JobConfig& c);

/// JSON with every number at 17 significant digits; NaN and infinities become null.
std::string dump_json(const json& j);
/// Flat projection of results.rows.
std::string to_csv(const json& report);

/// {"error": {code, message, exit_code}} for stderr.
json error_object(const std::string& code, const std::string& message, int exitCode);

}  // namespace tra::cli
