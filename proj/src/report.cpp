#include "modlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "modlab/errors.hpp"

namespace modlab {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string csv_real(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return format_real(v);
}

Json battery_json(const std::vector<BatteryQuad>& battery) {
    Json out = Json::array();
    for (const auto& bq : battery)
        out.push_back({{"id", bq.id},
                       {"rect", {bq.quad.rect.x0, bq.quad.rect.y0, bq.quad.rect.x1, bq.quad.rect.y1}},
                       {"zeta_1", to_string(bq.quad.side(1))}});
    return out;
}

Json header(const std::string& experiment, const ExperimentConfig& cfg, const std::vector<int>& depths,
            const std::vector<int>& resolutions) {
    return {{"experiment", experiment}, {"config", config_json(cfg)}, {"depths", depths}, {"resolutions", resolutions}};
}

Json dimension_json(const BoxDimension& d) {
    Json counts = Json::array();
    for (const auto& c : d.counts)
        counts.push_back({{"scale", c.scale}, {"count", c.count}, {"cover_sum", number(c.cover_sum)}});
    return {{"slope", d.slope}, {"intercept", d.intercept}, {"residual", d.residual}, {"counts", counts}};
}

} // namespace

Json to_json(const ModulusResult& r) {
    Json j;
    j["value"] = number(r.value);
    j["iterations"] = r.iterations;
    j["certificate"] = number(r.certificate);
    j["solver"] = to_string(r.solver);
    j["grid_n"] = r.grid_n;
    j["tolerance"] = r.tolerance;
    j["converged"] = r.converged;
    j["divergent"] = r.divergent;
    j["no_curves"] = r.no_curves;
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

Json config_json(const ExperimentConfig& cfg) {
    Json j = Json::object();
    for (const auto& [k, v] : config_echo(cfg))
        j[k] = v;
    return j;
}

std::string deficiency_verdict(const DeficiencyReport& rep, const std::string& quad_id) {
    const auto r = rep.ratios(quad_id, rep.depths.back());
    if (r.empty())
        return "no counterexample found";
    const bool low = r.back() < 1.0 - 1e-3;
    const bool rising = r.size() >= 2 && r.back() > r[r.size() - 2];
    return low && !rising ? "deficiency detected" : "no counterexample found";
}

Json to_json(const DeficiencyReport& rep, const ExperimentConfig& cfg) {
    Json j = header("deficiency", cfg, rep.depths, rep.resolutions);
    j["battery"] = battery_json(rep.battery);
    Json cells = Json::array();
    for (const auto& c : rep.cells) {
        Json row = {{"quad_id", c.quad_id},   {"depth", c.depth},
                    {"n", c.n},               {"mod_full", number(c.mod_full)},
                    {"mod_removed", number(c.mod_removed)}, {"ratio", number(c.ratio)},
                    {"removed_nodes", c.removed_nodes}};
        if (!c.error.empty())
            row["error"] = c.error;
        cells.push_back(row);
    }
    j["cells"] = cells;
    Json trends = Json::object();
    for (const auto& bq : rep.battery) {
        Json per_depth = Json::object();
        for (int d : rep.depths)
            per_depth[std::to_string(d)] = rep.trend(bq.id, d);
        trends[bq.id] = {{"trend", per_depth}, {"verdict", deficiency_verdict(rep, bq.id)}};
    }
    j["trends"] = trends;
    return j;
}

Json to_json(const ReciprocalityReport& rep, const ExperimentConfig& cfg) {
    Json j = header("reciprocality", cfg, rep.depths, rep.resolutions);
    j["battery"] = battery_json(rep.battery);
    Json cells = Json::array();
    for (const auto& c : rep.cells) {
        Json row = {{"quad_id", c.quad_id},
                    {"depth", c.depth},
                    {"n", c.n},
                    {"mod", number(c.mod)},
                    {"mod_dual", number(c.mod_dual)},
                    {"product", number(c.product)},
                    {"converged", c.converged},
                    {"divergent", c.divergent},
                    {"paths", c.paths}};
        if (!c.error.empty())
            row["error"] = c.error;
        cells.push_back(row);
    }
    j["cells"] = cells;
    return j;
}

Json to_json(const QcDimensionReport& rep, const ExperimentConfig& cfg) {
    Json j = header("dimension", cfg, rep.depths, rep.resolutions);
    Json cells = Json::array();
    for (const auto& c : rep.cells) {
        Json row = {{"depth", c.depth},
                    {"n", c.n},
                    {"euclidean", dimension_json(c.euclidean)},
                    {"weighted", dimension_json(c.weighted)},
                    {"weighted_diameter", c.weighted_diameter}};
        if (!c.error.empty())
            row["error"] = c.error;
        cells.push_back(row);
    }
    j["cells"] = cells;
    return j;
}

std::string to_csv(const DeficiencyReport& rep) {
    std::ostringstream out;
    out << "set,depth,quad_id,n,mod_full,mod_removed,ratio\n";
    const std::string set = to_string(rep.set.kind);
    for (const auto& c : rep.cells)
        out << set << ',' << c.depth << ',' << c.quad_id << ',' << c.n << ',' << csv_real(c.mod_full) << ','
            << csv_real(c.error.empty() ? c.mod_removed : NAN) << ',' << csv_real(c.error.empty() ? c.ratio : NAN)
            << '\n';
    return out.str();
}

std::string to_csv(const ReciprocalityReport& rep) {
    std::ostringstream out;
    out << "set,depth,quad_id,n,mod,mod_dual,product,converged,divergent\n";
    const std::string set = to_string(rep.set.kind);
    for (const auto& c : rep.cells)
        out << set << ',' << c.depth << ',' << c.quad_id << ',' << c.n << ',' << csv_real(c.mod) << ','
            << csv_real(c.mod_dual) << ',' << csv_real(c.product) << ',' << (c.converged ? 1 : 0) << ','
            << (c.divergent ? 1 : 0) << '\n';
    return out.str();
}

std::string to_csv(const QcDimensionReport& rep) {
    std::ostringstream out;
    out << "set,depth,n,euclidean,euclidean_residual,weighted,weighted_residual,weighted_diameter\n";
    const std::string set = to_string(rep.set.kind);
    for (const auto& c : rep.cells)
        out << set << ',' << c.depth << ',' << c.n << ',' << csv_real(c.euclidean.slope) << ','
            << csv_real(c.euclidean.residual) << ',' << csv_real(c.weighted.slope) << ','
            << csv_real(c.weighted.residual) << ',' << csv_real(c.weighted_diameter) << '\n';
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::deficiency: return "deficiency";
    case ExperimentKind::reciprocality: return "reciprocality";
    case ExperimentKind::dimension: return "dimension";
    }
    return "?";
}

RunOutcome run_experiments(const ExperimentConfig& cfg, std::optional<ExperimentKind> only) {
    cfg.validate();
    RunOutcome out;
    const auto& dir = cfg.output_dir;
    std::filesystem::create_directories(dir);

    LabOptions opt;
    opt.workers = cfg.worker_count();
    opt.conductance = cfg.conductance;
    opt.cutting_plane = cfg.cutting_plane;
    if (cfg.emit_heatmaps) {
        opt.heatmap_dir = dir / (cfg.name + "_heatmaps");
        std::filesystem::create_directories(opt.heatmap_dir);
    }

    auto wanted = [&](ExperimentKind k, const ExperimentSettings& s) {
        if (only)
            return *only == k;
        return s.enabled;
    };
    if (only) {
        const ExperimentSettings& s = *only == ExperimentKind::deficiency      ? cfg.deficiency
                                      : *only == ExperimentKind::reciprocality ? cfg.reciprocality
                                                                               : cfg.dimension;
        if (!s.enabled)
            throw ParameterError(to_string(*only) + ".enabled", "experiment is not enabled in the config");
    }
    auto emit = [&](const std::string& experiment, const Json& j, const std::string& csv) {
        const auto json_path = dir / (cfg.name + "_" + experiment + ".json");
        const auto csv_path = dir / (cfg.name + "_" + experiment + ".csv");
        write_text(json_path, j.dump(2) + "\n");
        write_text(csv_path, csv);
        out.files.push_back(json_path);
        out.files.push_back(csv_path);
    };

    const Rect frame = battery_frame(cfg.set);
    const auto battery = select_battery(frame, cfg.battery);

    if (wanted(ExperimentKind::deficiency, cfg.deficiency)) {
        const auto rep = ab_deficiency(cfg.set, cfg.depths, battery, cfg.deficiency.resolutions, opt);
        emit("deficiency", to_json(rep, cfg), to_csv(rep));
        for (const auto& c : rep.cells)
            if (!c.error.empty())
                out.problems.push_back("deficiency cell " + c.quad_id + " depth " + std::to_string(c.depth) + " n " +
                                       std::to_string(c.n) + ": " + c.error);
    }
    if (wanted(ExperimentKind::reciprocality, cfg.reciprocality)) {
        const auto rep =
            reciprocality_probe(cfg.set, cfg.weight, cfg.depths, battery, cfg.reciprocality.resolutions, opt);
        emit("reciprocality", to_json(rep, cfg), to_csv(rep));
        for (const auto& c : rep.cells)
            if (!c.error.empty() || !c.converged)
                out.problems.push_back("reciprocality cell " + c.quad_id + " depth " + std::to_string(c.depth) +
                                       " n " + std::to_string(c.n) + ": " +
                                       (c.error.empty() ? std::string("not converged") : c.error));
    }
    if (wanted(ExperimentKind::dimension, cfg.dimension)) {
        const auto rep = qc_dimension_experiment(cfg.set, cfg.depths, cfg.dimension.resolutions, opt);
        emit("dimension", to_json(rep, cfg), to_csv(rep));
        for (const auto& c : rep.cells)
            if (!c.error.empty())
                out.problems.push_back("dimension cell depth " + std::to_string(c.depth) + " n " +
                                       std::to_string(c.n) + ": " + c.error);
    }
    out.exit_code = out.problems.empty() ? 0 : 3;
    return out;
}

Json merge_reports(const std::vector<std::filesystem::path>& files) {
    if (files.empty())
        throw ParameterError("report", "no report files given");
    std::vector<std::pair<std::string, Json>> parts;
    for (const auto& f : files) {
        Json j;
        try {
            j = Json::parse(read_text(f));
        } catch (const Json::parse_error& e) {
            throw FormatError("malformed report " + f.filename().string(), e.byte);
        }
        if (!j.is_object() || !j.contains("experiment") || !j.contains("cells"))
            throw FormatError("not a modlab report: " + f.filename().string(), 0);
        parts.emplace_back(f.filename().string(), std::move(j));
    }
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Json summary = {{"reports", Json::object()}, {"total_cells", 0}};
    std::size_t total = 0;
    for (auto& [name, j] : parts) {
        total += j["cells"].size();
        summary["reports"][name] = std::move(j);
    }
    summary["total_cells"] = total;
    return summary;
}

} // namespace modlab
