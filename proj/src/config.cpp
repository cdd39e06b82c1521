#include "modlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "modlab/errors.hpp"
#include "modlab/parallel.hpp"

namespace modlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

bool parse_bool(const std::string& text, const std::string& field) {
    if (text == "true" || text == "yes" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "0")
        return false;
    throw ParameterError(field, "expected true or false, got '" + text + "'");
}

const std::set<std::string> kKnownKeys = {
    "experiment.name",      "set.kind",           "set.ratio",          "set.anchor",
    "set.length",           "set.gaps",           "set.a",              "set.b",
    "set.vertices",         "set.center",         "set.radius",         "set.mask",
    "set.depths",           "weight.kind",        "weight.p",           "battery.quads",
    "grid.resolutions",     "deficiency.enabled", "deficiency.resolutions", "reciprocality.enabled",
    "reciprocality.resolutions", "dimension.enabled", "dimension.resolutions", "solver.cg_tol",
    "solver.cg_max_iter_factor", "solver.cp_tol", "solver.cp_max_paths", "solver.cp_paths_per_round",
    "output.dir",           "output.emit_heatmaps", "output.workers",
};

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k)
        s += (k ? ", " : "") + std::to_string(v[k]);
    return s;
}

std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k)
        s += (k ? ", " : "") + format_real(v[k]);
    return s;
}

std::string point_text(Point p) { return format_real(p.x) + "," + format_real(p.y); }

} // namespace

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    auto number = [&](const std::string& s) {
        if (s.empty())
            throw ParameterError(field, "expected a number");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ParameterError(field, "expected a number, got '" + s + "'");
        }
        if (used != s.size() || !std::isfinite(v))
            throw ParameterError(field, "expected a number, got '" + s + "'");
        return v;
    };
    const auto slash = t.find('/');
    if (slash == std::string::npos)
        return number(t);
    const double den = number(trim(t.substr(slash + 1)));
    if (den == 0.0)
        throw ParameterError(field, "zero denominator");
    return number(trim(t.substr(0, slash))) / den;
}

int parse_int(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t, &used);
    } catch (const std::exception&) {
        throw ParameterError(field, "expected an integer, got '" + t + "'");
    }
    if (used != t.size() || v < -(1L << 30) || v > (1L << 30))
        throw ParameterError(field, "expected an integer, got '" + t + "'");
    return static_cast<int>(v);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
    std::vector<int> out;
    if (trim(text).empty())
        return out;
    for (const auto& item : split(text, ','))
        out.push_back(parse_int(item, field));
    return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    if (trim(text).empty())
        return out;
    for (const auto& item : split(text, ','))
        out.push_back(parse_real(item, field));
    return out;
}

Point parse_point(const std::string& text, const std::string& field) {
    const auto parts = split(text, ',');
    if (parts.size() != 2)
        throw ParameterError(field, "expected x,y");
    return {parse_real(parts[0], field), parse_real(parts[1], field)};
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
    KeyValueFile f;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParameterError("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("line " + std::to_string(lineno), "expected key = value");
        if (section.empty())
            throw ParameterError("line " + std::to_string(lineno), "key outside any section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        if (f.values_.count(key))
            throw ParameterError(key, "duplicate key");
        f.values_[key] = trim(line.substr(eq + 1));
        f.lines_[key] = lineno;
    }
    return f;
}

const std::string& KeyValueFile::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ParameterError(key, "missing");
    return it->second;
}

int KeyValueFile::line(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

int ExperimentConfig::worker_count() const { return workers > 0 ? workers : default_workers(); }

void ExperimentConfig::validate() const {
    set.validate();
    weight.validate();
    if (depths.empty())
        throw ParameterError("set.depths", "at least one depth is required");
    for (std::size_t k = 0; k < depths.size(); ++k) {
        if (depths[k] < 0)
            throw ParameterError("set.depths", "depth must be non-negative");
        if (k && depths[k] <= depths[k - 1])
            throw ParameterError("set.depths", "depths must increase");
    }
    if (set.kind == SetKind::fat_cantor && depths.back() > 0)
        set.fat_gap(depths.back() - 1);
    auto check = [](const ExperimentSettings& s, const std::string& section) {
        if (!s.enabled)
            return;
        if (s.resolutions.empty())
            throw ParameterError(section + ".resolutions", "at least one resolution is required");
        for (std::size_t k = 0; k < s.resolutions.size(); ++k) {
            if (s.resolutions[k] < 3)
                throw ParameterError(section + ".resolutions", "resolution must be at least 3");
            if (k && s.resolutions[k] <= s.resolutions[k - 1])
                throw ParameterError(section + ".resolutions", "resolutions must increase");
        }
    };
    check(deficiency, "deficiency");
    check(reciprocality, "reciprocality");
    check(dimension, "dimension");
    if (!deficiency.enabled && !reciprocality.enabled && !dimension.enabled)
        throw ParameterError("experiments", "no experiment enabled");
    if (!(conductance.rel_tol > 0.0))
        throw ParameterError("solver.cg_tol", "tolerance must be positive");
    if (!(conductance.max_iter_factor > 0.0))
        throw ParameterError("solver.cg_max_iter_factor", "must be positive");
    if (!(cutting_plane.tol > 0.0) || !(cutting_plane.tol < 1.0))
        throw ParameterError("solver.cp_tol", "tolerance must lie in (0, 1)");
    if (cutting_plane.max_paths < 1)
        throw ParameterError("solver.cp_max_paths", "must be positive");
    if (cutting_plane.paths_per_round < 1)
        throw ParameterError("solver.cp_paths_per_round", "must be positive");
    if (workers < 0)
        throw ParameterError("output.workers", "must be non-negative");
    if (dimension.enabled && !set.is_cantor() && !(set.kind == SetKind::segment && set.a == set.b))
        throw ParameterError("dimension.enabled", "dimension experiment needs a Cantor kind or a point");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    const KeyValueFile kv = KeyValueFile::parse(text);
    for (const auto& [key, value] : kv.values())
        if (!kKnownKeys.count(key))
            throw ParameterError(key, "unknown key");

    ExperimentConfig cfg;
    auto opt = [&](const std::string& key) -> const std::string* { return kv.has(key) ? &kv.get(key) : nullptr; };

    if (auto v = opt("experiment.name"))
        cfg.name = *v;

    const std::string kind = kv.get("set.kind");
    try {
        cfg.set.kind = set_kind_from_string(kind);
    } catch (const std::exception&) {
        throw ParameterError("set.kind", "unknown set kind '" + kind + "'");
    }
    if (auto v = opt("set.ratio"))
        cfg.set.ratio = parse_real(*v, "set.ratio");
    if (auto v = opt("set.anchor"))
        cfg.set.anchor = parse_point(*v, "set.anchor");
    if (auto v = opt("set.length"))
        cfg.set.length = parse_real(*v, "set.length");
    if (auto v = opt("set.gaps"))
        cfg.set.gaps = parse_real_list(*v, "set.gaps");
    if (auto v = opt("set.a"))
        cfg.set.a = parse_point(*v, "set.a");
    if (auto v = opt("set.b"))
        cfg.set.b = parse_point(*v, "set.b");
    if (auto v = opt("set.vertices")) {
        cfg.set.vertices.clear();
        for (const auto& p : split(*v, ';'))
            cfg.set.vertices.push_back(parse_point(p, "set.vertices"));
    }
    if (auto v = opt("set.center"))
        cfg.set.center = parse_point(*v, "set.center");
    if (auto v = opt("set.radius"))
        cfg.set.radius = parse_real(*v, "set.radius");
    if (cfg.set.kind == SetKind::raw_mask) {
        cfg.mask_path = kv.get("set.mask");
        std::filesystem::path p = cfg.mask_path;
        if (p.is_relative())
            p = base_dir / p;
        cfg.set.mask = std::make_shared<PixelMask>(load_mask(p));
    }
    if (auto v = opt("set.depths"))
        cfg.depths = parse_int_list(*v, "set.depths");

    if (auto v = opt("weight.kind")) {
        try {
            cfg.weight.kind = weight_kind_from_string(*v);
        } catch (const std::exception&) {
            throw ParameterError("weight.kind", "unknown weight kind '" + *v + "'");
        }
    }
    if (auto v = opt("weight.p"))
        cfg.weight.p = parse_real(*v, "weight.p");

    if (auto v = opt("battery.quads")) {
        for (const auto& id : split(*v, ','))
            if (!id.empty())
                cfg.battery.push_back(id);
    }

    std::vector<int> shared;
    if (auto v = opt("grid.resolutions"))
        shared = parse_int_list(*v, "grid.resolutions");
    auto experiment = [&](ExperimentSettings& s, const std::string& section) {
        if (auto v = opt(section + ".enabled"))
            s.enabled = parse_bool(*v, section + ".enabled");
        s.resolutions = shared;
        if (auto v = opt(section + ".resolutions"))
            s.resolutions = parse_int_list(*v, section + ".resolutions");
    };
    experiment(cfg.deficiency, "deficiency");
    experiment(cfg.reciprocality, "reciprocality");
    experiment(cfg.dimension, "dimension");

    if (auto v = opt("solver.cg_tol"))
        cfg.conductance.rel_tol = parse_real(*v, "solver.cg_tol");
    if (auto v = opt("solver.cg_max_iter_factor"))
        cfg.conductance.max_iter_factor = parse_real(*v, "solver.cg_max_iter_factor");
    if (auto v = opt("solver.cp_tol"))
        cfg.cutting_plane.tol = parse_real(*v, "solver.cp_tol");
    if (auto v = opt("solver.cp_max_paths"))
        cfg.cutting_plane.max_paths = parse_int(*v, "solver.cp_max_paths");
    if (auto v = opt("solver.cp_paths_per_round"))
        cfg.cutting_plane.paths_per_round = parse_int(*v, "solver.cp_paths_per_round");

    if (auto v = opt("output.dir"))
        cfg.output_dir = *v;
    if (const char* env = std::getenv("MODLAB_OUT"); env && *env)
        cfg.output_dir = env;
    if (auto v = opt("output.emit_heatmaps"))
        cfg.emit_heatmaps = parse_bool(*v, "output.emit_heatmaps");
    if (auto v = opt("output.workers"))
        cfg.workers = parse_int(*v, "output.workers");

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParameterError("config", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> e;
    e["experiment.name"] = cfg.name;
    const CompactSetSpec& s = cfg.set;
    e["set.kind"] = to_string(s.kind);
    switch (s.kind) {
    case SetKind::cantor_line:
    case SetKind::cantor_product:
        e["set.ratio"] = format_real(s.ratio);
        [[fallthrough]];
    case SetKind::fat_cantor:
        e["set.anchor"] = point_text(s.anchor);
        e["set.length"] = format_real(s.length);
        if (s.kind == SetKind::fat_cantor) {
            std::vector<double> gaps = s.gaps;
            if (gaps.empty())
                for (int k = 0; k < *std::max_element(cfg.depths.begin(), cfg.depths.end()); ++k)
                    gaps.push_back(s.fat_gap(k) / s.length);
            e["set.gaps"] = join_reals(gaps);
        }
        break;
    case SetKind::segment:
        e["set.a"] = point_text(s.a);
        e["set.b"] = point_text(s.b);
        break;
    case SetKind::polyline_arc: {
        std::string v;
        for (std::size_t k = 0; k < s.vertices.size(); ++k)
            v += (k ? "; " : "") + point_text(s.vertices[k]);
        e["set.vertices"] = v;
        break;
    }
    case SetKind::circle:
        e["set.center"] = point_text(s.center);
        e["set.radius"] = format_real(s.radius);
        break;
    case SetKind::raw_mask:
        e["set.mask"] = cfg.mask_path;
        e["set.mask_occupied"] = std::to_string(s.mask->count());
        break;
    }
    e["set.depths"] = join_ints(cfg.depths);
    e["weight.kind"] = to_string(cfg.weight.kind);
    e["weight.p"] = format_real(cfg.weight.p);
    std::string quads;
    for (std::size_t k = 0; k < cfg.battery.size(); ++k)
        quads += (k ? ", " : "") + cfg.battery[k];
    e["battery.quads"] = quads.empty() ? "all" : quads;
    auto experiment = [&](const ExperimentSettings& x, const std::string& section) {
        e[section + ".enabled"] = x.enabled ? "true" : "false";
        e[section + ".resolutions"] = join_ints(x.resolutions);
    };
    experiment(cfg.deficiency, "deficiency");
    experiment(cfg.reciprocality, "reciprocality");
    experiment(cfg.dimension, "dimension");
    e["solver.cg_tol"] = format_real(cfg.conductance.rel_tol);
    e["solver.cg_max_iter_factor"] = format_real(cfg.conductance.max_iter_factor);
    e["solver.cp_tol"] = format_real(cfg.cutting_plane.tol);
    e["solver.cp_inner_tol"] =
        format_real(cfg.cutting_plane.inner_tol > 0.0 ? cfg.cutting_plane.inner_tol : 0.1 * cfg.cutting_plane.tol);
    e["solver.cp_max_paths"] = std::to_string(cfg.cutting_plane.max_paths);
    e["solver.cp_paths_per_round"] = std::to_string(cfg.cutting_plane.paths_per_round);
    e["output.emit_heatmaps"] = cfg.emit_heatmaps ? "true" : "false";
    e["output.workers"] = std::to_string(cfg.workers);
    return e;
}

} // namespace modlab
