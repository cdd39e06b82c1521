#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modlab/config.hpp"
#include "modlab/errors.hpp"
#include "modlab/modulus.hpp"
#include "modlab/report.hpp"
#include "modlab/set_library.hpp"
#include "modlab/weight_engine.hpp"

using namespace modlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

struct GenSetArgs {
    std::string kind;
    std::string ratio = "1/3";
    int depth = 0;
    double length = 1.0;
    std::string anchor = "0,0";
    std::string gaps;
    std::string a = "0,0", b = "1,0";
    std::string center = "0,0";
    double radius = 1.0;
    int n = 0;
    std::string out;
};

int gen_set(const GenSetArgs& g) {
    const std::string kind = g.kind == "cantor" ? "cantor_line" : g.kind;
    CompactSetSpec spec;
    spec.kind = set_kind_from_string(kind);
    spec.ratio = parse_real(g.ratio, "ratio");
    spec.length = g.length;
    spec.anchor = parse_point(g.anchor, "anchor");
    spec.gaps = parse_real_list(g.gaps, "gaps");
    spec.a = parse_point(g.a, "a");
    spec.b = parse_point(g.b, "b");
    spec.center = parse_point(g.center, "center");
    spec.radius = g.radius;
    if (spec.kind == SetKind::raw_mask || spec.kind == SetKind::polyline_arc)
        throw ParameterError("kind", "gen-set supports Cantor kinds, segment and circle");
    if (g.depth < 0)
        throw ParameterError("depth", "must be non-negative");
    spec.validate();

    const Generation gen = generate(spec, g.depth);
    const bool line = spec.kind == SetKind::cantor_line || spec.kind == SetKind::fat_cantor;
    std::printf("%zu %s\n", gen.piece_count(), line ? "intervals" : "pieces");
    for (const auto& b : gen.boxes) {
        if (line)
            std::printf("[%.17g, %.17g]\n", b.x0, b.x1);
        else
            std::printf("box %.17g %.17g %.17g %.17g\n", b.x0, b.y0, b.x1, b.y1);
    }
    for (const auto& s : gen.segments)
        std::printf("segment %.17g %.17g %.17g %.17g\n", s.a.x, s.a.y, s.b.x, s.b.y);
    for (const auto& c : gen.circles)
        std::printf("circle %.17g %.17g %.17g\n", c.center.x, c.center.y, c.radius);

    if (!g.out.empty()) {
        if (g.n < 3)
            throw ParameterError("n", "--out needs --n >= 3");
        const Rect bb = spec.bounding_box();
        const double side = std::max(bb.width(), bb.height());
        const double extent = side > 0.0 ? side : 1.0;
        const Point c = bb.center();
        const Grid grid = Grid::square({c.x - 0.5 * extent, c.y - 0.5 * extent}, extent, g.n);
        const PixelMask mask = rasterize(spec, g.depth, grid);
        save_mask(mask, g.out);
        std::fprintf(stderr, "wrote %s (%zu occupied)\n", g.out.c_str(), mask.count());
    }
    return kExitOk;
}

struct ModulusArgs {
    std::vector<double> annulus;
    std::vector<double> rect;
    std::string center = "0,0";
    double extent = 0.0;
    int n = 129;
    bool dual = false;
    std::string mask;
    std::string solver = "conductance";
    double cp_tol = 1e-3;
    bool json = false;
};

int modulus(const ModulusArgs& m) {
    std::optional<ModulusResult> res;
    if (!m.annulus.empty()) {
        if (m.annulus.size() != 2)
            throw ParameterError("annulus", "expected r R");
        const double r = m.annulus[0], R = m.annulus[1];
        const Point c = parse_point(m.center, "center");
        const double half = m.extent > 0.0 ? 0.5 * m.extent : R;
        const Grid grid = Grid::square({c.x - half, c.y - half}, 2.0 * half, m.n);
        if (m.solver == "conductance") {
            res = annulus_modulus(c, r, R, grid);
        } else {
            CurveFamilySpec f{.kind = CurveFamilySpec::Kind::annulus, .region = grid, .center = c, .r = r, .R = R};
            res = family_modulus_cutting_plane(f, {.tol = m.cp_tol});
        }
        if (!m.json)
            std::printf("annulus r=%.17g R=%.17g n=%d\nexpected 2*pi/log(R/r) = %.6f\n", r, R, m.n,
                        2.0 * M_PI / std::log(R / r));
    } else {
        std::optional<PixelMask> removed;
        Quadrilateral q;
        Grid grid = Grid::square({0, 0}, 1, 3);
        if (!m.mask.empty()) {
            removed = load_mask(m.mask);
            grid = removed->grid();
            q = {grid.extent(), Side::left};
        } else {
            if (m.rect.size() != 2)
                throw ParameterError("rect", "expected W H (or --annulus r R)");
            q = {{0.0, 0.0, m.rect[0], m.rect[1]}, Side::left};
            grid = Grid::covering(q.rect, m.n);
        }
        if (m.dual)
            q = q.dual();
        if (m.solver == "conductance") {
            res = quad_modulus_conductance(q, grid, removed ? &*removed : nullptr);
        } else {
            CurveFamilySpec f{.kind = CurveFamilySpec::Kind::quad_primal, .region = grid, .quad = q};
            f.removed = removed;
            res = family_modulus_cutting_plane(f, {.tol = m.cp_tol});
        }
    }
    if (m.json)
        std::cout << to_json(*res).dump(2) << "\n";
    else
        std::printf("modulus %.10g\n", res->value);
    return res->converged ? kExitOk : kExitNumeric;
}

int run(const std::string& path, std::optional<ExperimentKind> only) {
    const ExperimentConfig cfg = load_config(path);
    const RunOutcome out = run_experiments(cfg, only);
    for (const auto& f : out.files)
        std::printf("wrote %s\n", f.string().c_str());
    for (const auto& p : out.problems)
        std::fprintf(stderr, "%s\n", p.c_str());
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"modlab: modulus, weighted metrics and Hausdorff content of planar compact sets"};
    app.require_subcommand(1);

    GenSetArgs gs;
    auto* gen = app.add_subcommand("gen-set", "Print one generation of a set; optionally rasterise to a mask file");
    gen->add_option("kind", gs.kind, "cantor (cantor_line), cantor_product, fat_cantor, segment, circle")->required();
    gen->add_option("ratio", gs.ratio, "Removal ratio, e.g. 1/3");
    gen->add_option("--depth", gs.depth, "Generation depth");
    gen->add_option("--length", gs.length, "Seed interval length");
    gen->add_option("--anchor", gs.anchor, "Lower-left anchor x,y");
    gen->add_option("--gaps", gs.gaps, "Fat Cantor gaps as fractions of the length, comma separated");
    gen->add_option("--a", gs.a, "Segment start x,y");
    gen->add_option("--b", gs.b, "Segment end x,y");
    gen->add_option("--center", gs.center, "Circle centre x,y");
    gen->add_option("--radius", gs.radius, "Circle radius");
    gen->add_option("--n", gs.n, "Nodes per side for --out");
    gen->add_option("--out", gs.out, "Write a MODLAB-MASK file");

    std::string mask_in, field_out, pgm_out;
    auto* dist = app.add_subcommand("distance", "Distance transform of a mask, written as CSV");
    dist->add_option("--mask", mask_in, "Input mask file")->required();
    dist->add_option("--out", field_out, "Output CSV")->required();
    dist->add_option("--pgm", pgm_out, "Also write a PGM heatmap");

    std::string field_in, weight_kind = "lemma35", weight_out, weight_csv;
    double weight_p = 2.0;
    auto* wt = app.add_subcommand("weight", "Evaluate a conformal weight on a saved distance field");
    wt->add_option("--field", field_in, "Distance field CSV")->required();
    wt->add_option("--kind", weight_kind, "lemma35, power, indicator_complement");
    wt->add_option("--p", weight_p, "Exponent for the power kind");
    wt->add_option("--out", weight_out, "Output PGM")->required();
    wt->add_option("--csv", weight_csv, "Also write the field as CSV");

    ModulusArgs ma;
    auto* mod = app.add_subcommand("modulus", "Modulus of an annulus or rectangle family");
    mod->add_option("--annulus", ma.annulus, "r R")->expected(2);
    mod->add_option("--rect", ma.rect, "W H (curves join the sides of length H)")->expected(2);
    mod->add_option("--center", ma.center, "Annulus centre x,y");
    mod->add_option("--extent", ma.extent, "Side of the square grid around the annulus (default 2R)");
    mod->add_option("--n", ma.n, "Nodes along the longer side");
    mod->add_flag("--dual", ma.dual, "Use the conjugate family");
    mod->add_option("--mask", ma.mask, "Removed set; the rectangle is the mask grid");
    mod->add_option("--solver", ma.solver, "conductance or cutting_plane")
        ->check(CLI::IsMember({"conductance", "cutting_plane"}));
    mod->add_option("--cp-tol", ma.cp_tol, "Cutting-plane admissibility tolerance");
    mod->add_flag("--json", ma.json, "Print the result as JSON");

    std::string cfg_path;
    auto* def = app.add_subcommand("deficiency", "Run the deficiency experiment of a config");
    def->add_option("config", cfg_path, "Config file")->required();
    auto* rec = app.add_subcommand("reciprocality", "Run the reciprocality probe of a config");
    rec->add_option("config", cfg_path, "Config file")->required();
    auto* dim = app.add_subcommand("dimension", "Run the dimension experiment of a config");
    dim->add_option("config", cfg_path, "Config file")->required();
    auto* all = app.add_subcommand("run", "Run every enabled experiment of a config");
    all->add_option("config", cfg_path, "Config file")->required();

    std::vector<std::string> report_in;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "Merge report JSON files into one summary");
    rep->add_option("files", report_in, "Report JSON files")->required();
    rep->add_option("--out", report_out, "Summary file (default: stdout)");

    std::set<std::string> names;
    for (const auto* sc : app.get_subcommands({}))
        names.insert(sc->get_name());
    if (argc < 2 || (argv[1][0] != '-' && !names.count(argv[1]))) {
        if (argc >= 2)
            std::cerr << "unknown subcommand '" << argv[1] << "'\n";
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*gen)
            return gen_set(gs);
        if (*dist) {
            const PixelMask mask = load_mask(mask_in);
            const ScalarField d = distance_transform(mask);
            save_csv(d, field_out);
            if (!pgm_out.empty())
                save_pgm(d, pgm_out);
            return kExitOk;
        }
        if (*wt) {
            WeightSpec spec{weight_kind_from_string(weight_kind), weight_p};
            const ScalarField omega = eval_weight(load_csv(field_in), spec);
            save_pgm(omega, weight_out);
            if (!weight_csv.empty())
                save_csv(omega, weight_csv);
            return kExitOk;
        }
        if (*mod)
            return modulus(ma);
        if (*def)
            return run(cfg_path, ExperimentKind::deficiency);
        if (*rec)
            return run(cfg_path, ExperimentKind::reciprocality);
        if (*dim)
            return run(cfg_path, ExperimentKind::dimension);
        if (*all)
            return run(cfg_path, std::nullopt);
        if (*rep) {
            const std::vector<std::filesystem::path> files(report_in.begin(), report_in.end());
            const std::string text = merge_reports(files).dump(2) + "\n";
            if (report_out.empty())
                std::cout << text;
            else
                write_text(report_out, text);
            return kExitOk;
        }
    } catch (const ParameterError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
