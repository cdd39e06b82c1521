#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modlab/config.hpp"
#include "modlab/removability_lab.hpp"

namespace modlab {

using Json = nlohmann::ordered_json;

// {value, iterations, certificate, solver, grid_n, tolerance} plus status flags. Infinite
// values are written as null with "divergent": true.
Json to_json(const ModulusResult& r);

Json config_json(const ExperimentConfig& cfg);

// Per quad at the deepest depth: "deficiency detected" when the finest ratio is below
// 1 - 1e-3 and did not rise at the last refinement, else "no counterexample found".
std::string deficiency_verdict(const DeficiencyReport& rep, const std::string& quad_id);

Json to_json(const DeficiencyReport& rep, const ExperimentConfig& cfg);
Json to_json(const ReciprocalityReport& rep, const ExperimentConfig& cfg);
Json to_json(const QcDimensionReport& rep, const ExperimentConfig& cfg);

// Flat tables.
//   deficiency:    set,depth,quad_id,n,mod_full,mod_removed,ratio
//   reciprocality: set,depth,quad_id,n,mod,mod_dual,product,converged,divergent
//   dimension:     set,depth,n,euclidean,euclidean_residual,weighted,weighted_residual,weighted_diameter
std::string to_csv(const DeficiencyReport& rep);
std::string to_csv(const ReciprocalityReport& rep);
std::string to_csv(const QcDimensionReport& rep);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

enum class ExperimentKind { deficiency, reciprocality, dimension };
std::string to_string(ExperimentKind kind);

struct RunOutcome {
    int exit_code = 0; // 0 ok, 3 a cell failed or did not converge
    std::vector<std::filesystem::path> files;
    std::vector<std::string> problems; // one line per failed cell, naming it
};

// Runs the enabled experiments (or only `only`, which must be enabled) and writes
// <name>_<experiment>.json / .csv into the output directory.
RunOutcome run_experiments(const ExperimentConfig& cfg, std::optional<ExperimentKind> only = std::nullopt);

// Merges report JSON files into one summary keyed by file name; input order is irrelevant.
Json merge_reports(const std::vector<std::filesystem::path>& files);

} // namespace modlab
