#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "modlab/modulus.hpp"
#include "modlab/set_library.hpp"
#include "modlab/weight_engine.hpp"

namespace modlab {

// Parsed `key = value` lines grouped by `[section]`. Keys are "section.key"; `#` starts a
// comment. Duplicate keys and lines outside a section are rejected.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }
    // Line number of a key, for messages.
    int line(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

struct ExperimentSettings {
    bool enabled = false;
    std::vector<int> resolutions;
};

struct ExperimentConfig {
    std::string name = "experiment";
    CompactSetSpec set;
    std::string mask_path; // raw_mask source, as written in the file
    std::vector<int> depths{0};
    WeightSpec weight;
    std::vector<std::string> battery; // empty: full default battery
    ExperimentSettings deficiency, reciprocality, dimension;
    ConductanceOptions conductance;
    CuttingPlaneOptions cutting_plane;
    std::filesystem::path output_dir = "out";
    bool emit_heatmaps = false;
    int workers = 0; // 0: available cores

    // Throws ParameterError naming the offending "section.key".
    void validate() const;
    int worker_count() const;
};

// Relative mask paths resolve against `base_dir`. MODLAB_OUT, when set, replaces the
// output directory.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolved configuration as `section.key -> value` text, every tolerance included.
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

// "1/3", "0.25", "1e-3".
double parse_real(const std::string& text, const std::string& field);
int parse_int(const std::string& text, const std::string& field);
std::vector<int> parse_int_list(const std::string& text, const std::string& field);
std::vector<double> parse_real_list(const std::string& text, const std::string& field);
Point parse_point(const std::string& text, const std::string& field);
std::string format_real(double v);

} // namespace modlab
