#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fid/fiducial1d.hpp"

namespace fid {

// Bad scenario document or field; `field` names the offending key when known.
struct ScenarioError : DomainError {
    ScenarioError(const std::string& field, const std::string& what)
        : DomainError(field.empty() ? what : field + ": " + what), field(field) {}
    std::string field;
};

struct GridSpec {
    double lo = 0.0, hi = 1.0;
    int points = 201;
};

struct Scenario {
    std::string command;
    std::string model;  // catalog model key, or cr-NEF family for "crnef"
    std::string chain;  // multi-parameter chain key; replaces model for the curve commands
    std::string route;  // "full" or "sufficient" for chains that offer both
    std::map<std::string, double> params;
    int n = 0;
    std::optional<double> s;   // sufficient statistic
    std::vector<double> svec;  // vector statistic for "crnef"
    std::vector<std::vector<double>> samples;  // raw data sets; one for most commands
    std::vector<FiducialVariant> variants;
    std::optional<GridSpec> grid;
    std::vector<double> levels;
    std::size_t replicates = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<double> theta0;
    std::string prior = "jeffreys";
    int d = 0;
    std::vector<int> ns;  // sample sizes for "risk"
    std::string output;   // file stem; defaults to the command name
};

std::vector<std::string> scenario_commands();

// JSON document, then "key=value" overrides (value read as JSON when it parses,
// else as a string). Defaults are filled and the result validated.
Scenario parse_scenario(const std::string& text, const std::vector<std::string>& overrides = {});

struct RunResult {
    std::vector<std::string> files;
    std::string summary;  // human-readable table for stdout
};

RunResult run_scenario(const Scenario& sc, const std::string& out_dir);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace fid
