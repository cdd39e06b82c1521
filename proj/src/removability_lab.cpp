#include "modlab/removability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "modlab/errors.hpp"
#include "modlab/metric_graph.hpp"
#include "modlab/parallel.hpp"

namespace modlab {

namespace {

Rect centred(Point c, double w, double h) { return {c.x - 0.5 * w, c.y - 0.5 * h, c.x + 0.5 * w, c.y + 0.5 * h}; }

void check_lists(std::span<const int> depths, std::span<const int> resolutions, bool need_depths = true) {
    if (need_depths && depths.empty())
        throw ParameterError("depths", "at least one depth is required");
    if (resolutions.empty())
        throw ParameterError("resolutions", "at least one resolution is required");
    for (std::size_t k = 1; k < depths.size(); ++k)
        if (depths[k] <= depths[k - 1])
            throw ParameterError("depths", "depths must increase");
    for (std::size_t k = 1; k < resolutions.size(); ++k)
        if (resolutions[k] <= resolutions[k - 1])
            throw ParameterError("resolutions", "resolutions must increase");
    for (int d : depths)
        if (d < 0)
            throw ParameterError("depths", "depth must be non-negative");
    for (int n : resolutions)
        if (n < 3)
            throw ParameterError("resolutions", "resolution must be at least 3");
}

void require_clear_sides(const BatteryQuad& bq, const PixelMask& mask) {
    for (int k : {1, 3})
        for (int v : side_nodes(mask.grid(), bq.quad.side(k)))
            if (mask.at(v))
                throw PreconditionError("quad " + bq.id + ": zeta_" + std::to_string(k) + " meets the set");
}

std::string heatmap_name(const std::string& experiment, const std::string& quad, int depth, int n) {
    return "rho_" + experiment + "_" + quad + "_d" + std::to_string(depth) + "_n" + std::to_string(n) + ".pgm";
}

ScalarField weight_on(const PixelMask& mask, const WeightSpec& w) {
    if (mask.empty())
        return ScalarField(mask.grid(), 1.0);
    return eval_weight(distance_transform(mask), w);
}

} // namespace

Rect battery_frame(const CompactSetSpec& set) {
    set.validate();
    Rect b = set.bounding_box();
    if (b.empty()) {
        if (set.kind == SetKind::raw_mask)
            b = set.mask->grid().extent();
        else
            throw GeometryError("set has an empty bounding box");
    }
    double d = std::max(b.width(), b.height());
    if (d == 0.0)
        d = 1.0;
    return centred(b.center(), d, d);
}

std::vector<BatteryQuad> default_battery(const Rect& frame) {
    const double d = std::max(frame.width(), frame.height());
    if (!(d > 0.0))
        throw GeometryError("battery frame must have positive size");
    const Point c = frame.center();
    return {
        {"h_cross", {centred(c, 2 * d, d), Side::left}},
        {"v_cross", {centred(c, d, 2 * d), Side::bottom}},
        {"h_cross_offset", {centred({c.x, c.y + 0.25 * d}, 2 * d, d), Side::left}},
        {"v_cross_offset", {centred({c.x + 0.25 * d, c.y}, d, 2 * d), Side::bottom}},
        {"frame_1.5", {centred(c, 1.5 * d, 1.5 * d), Side::left}},
        {"frame_2", {centred(c, 2 * d, 2 * d), Side::left}},
    };
}

std::vector<BatteryQuad> select_battery(const Rect& frame, std::span<const std::string> ids) {
    const auto all = default_battery(frame);
    if (ids.empty())
        return all;
    std::vector<BatteryQuad> out;
    for (const auto& id : ids) {
        auto it = std::find_if(all.begin(), all.end(), [&](const BatteryQuad& q) { return q.id == id; });
        if (it == all.end())
            throw ParameterError("battery", "unknown quadrilateral '" + id + "'");
        out.push_back(*it);
    }
    return out;
}

Grid quad_grid(const Quadrilateral& q, int n) { return Grid::covering(q.rect, n); }

int DeficiencyReport::trend(const std::string& quad_id, int depth) const {
    const auto r = ratios(quad_id, depth);
    if (r.size() < 2)
        return 0;
    const double d = r[r.size() - 1] - r[r.size() - 2];
    return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

std::vector<double> DeficiencyReport::ratios(const std::string& quad_id, int depth) const {
    std::vector<double> out;
    for (const auto& c : cells)
        if (c.quad_id == quad_id && c.depth == depth)
            out.push_back(c.ratio);
    return out;
}

bool DeficiencyReport::failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const DeficiencyCell& c) { return !c.error.empty(); });
}

DeficiencyReport ab_deficiency(const CompactSetSpec& set, std::span<const int> depths,
                               std::span<const BatteryQuad> battery, std::span<const int> resolutions,
                               const LabOptions& opt) {
    set.validate();
    check_lists(depths, resolutions);
    if (battery.empty())
        throw ParameterError("battery", "battery must not be empty");

    DeficiencyReport rep{set, {depths.begin(), depths.end()}, {resolutions.begin(), resolutions.end()},
                         {battery.begin(), battery.end()}, {}};
    const std::size_t nq = battery.size(), nn = resolutions.size();

    // Masks first, so a quad whose marked sides meet the set fails before any solve.
    std::vector<PixelMask> masks;
    for (int depth : depths)
        for (const auto& bq : battery)
            for (int n : resolutions) {
                masks.push_back(rasterize(set, depth, quad_grid(bq.quad, n), RasterMode::clip));
                require_clear_sides(bq, masks.back());
            }

    std::vector<double> full(nq * nn, 0.0);
    parallel_for(nq * nn, opt.workers, [&](std::size_t k) {
        const auto& bq = battery[k / nn];
        const Grid g = quad_grid(bq.quad, resolutions[k % nn]);
        full[k] = quad_modulus_conductance(bq.quad, g, nullptr, opt.conductance).value;
    });

    rep.cells.resize(masks.size());
    parallel_for(masks.size(), opt.workers, [&](std::size_t k) {
        const std::size_t qn = k % (nq * nn);
        const auto& bq = battery[qn / nn];
        DeficiencyCell& c = rep.cells[k];
        c.quad_id = bq.id;
        c.depth = depths[k / (nq * nn)];
        c.n = resolutions[qn % nn];
        c.mod_full = full[qn];
        c.removed_nodes = masks[k].count();
        try {
            const ModulusResult m = quad_modulus_conductance(bq.quad, masks[k].grid(), &masks[k], opt.conductance);
            c.mod_removed = m.value;
            c.ratio = c.mod_removed / c.mod_full;
            if (!opt.heatmap_dir.empty())
                save_pgm(m.rho, opt.heatmap_dir / heatmap_name("deficiency", c.quad_id, c.depth, c.n));
        } catch (const NumericError& e) {
            c.error = e.what();
        }
    });
    return rep;
}

std::vector<double> ReciprocalityReport::products(const std::string& quad_id, int depth) const {
    std::vector<double> out;
    for (const auto& c : cells)
        if (c.quad_id == quad_id && c.depth == depth)
            out.push_back(c.product);
    return out;
}

bool ReciprocalityReport::failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const ReciprocalityCell& c) { return !c.error.empty(); });
}

bool ReciprocalityReport::all_converged() const {
    return std::all_of(cells.begin(), cells.end(), [](const ReciprocalityCell& c) { return c.converged; });
}

ReciprocalityReport reciprocality_probe(const CompactSetSpec& set, const WeightSpec& weight,
                                        std::span<const int> depths, std::span<const BatteryQuad> battery,
                                        std::span<const int> resolutions, const LabOptions& opt) {
    set.validate();
    weight.validate();
    check_lists(depths, resolutions);
    if (battery.empty())
        throw ParameterError("battery", "battery must not be empty");

    ReciprocalityReport rep{set, weight, {depths.begin(), depths.end()}, {resolutions.begin(), resolutions.end()},
                            {battery.begin(), battery.end()}, {}};
    const std::size_t nq = battery.size(), nn = resolutions.size();
    const std::size_t cells = depths.size() * nq * nn;
    rep.cells.resize(cells);
    parallel_for(cells, opt.workers, [&](std::size_t k) {
        const std::size_t qn = k % (nq * nn);
        const auto& bq = battery[qn / nn];
        ReciprocalityCell& c = rep.cells[k];
        c.quad_id = bq.id;
        c.depth = depths[k / (nq * nn)];
        c.n = resolutions[qn % nn];
        const Grid g = quad_grid(bq.quad, c.n);
        const PixelMask mask = rasterize(set, c.depth, g, RasterMode::clip);
        const ScalarField omega = weight_on(mask, weight);
        try {
            CurveFamilySpec fam{.kind = CurveFamilySpec::Kind::quad_primal, .region = g, .quad = bq.quad};
            fam.length_weight = omega;
            const ModulusResult m = family_modulus_cutting_plane(fam, opt.cutting_plane);
            fam.kind = CurveFamilySpec::Kind::quad_dual;
            const ModulusResult md = family_modulus_cutting_plane(fam, opt.cutting_plane);
            c.mod = m.value;
            c.mod_dual = md.value;
            c.product = m.value * md.value;
            c.converged = m.converged && md.converged;
            c.divergent = m.divergent || md.divergent;
            c.paths = m.iterations + md.iterations;
            if (!opt.heatmap_dir.empty())
                save_pgm(m.rho, opt.heatmap_dir / heatmap_name("reciprocality", c.quad_id, c.depth, c.n));
        } catch (const NumericError& e) {
            c.error = e.what();
            c.converged = false;
        }
    });
    return rep;
}

bool QcDimensionReport::failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const DimensionCell& c) { return !c.error.empty(); });
}

QcDimensionReport qc_dimension_experiment(const CompactSetSpec& set, std::span<const int> depths,
                                          std::span<const int> resolutions, const LabOptions& opt) {
    set.validate();
    check_lists(depths, resolutions);
    const bool point = set.kind == SetKind::segment && set.a == set.b;
    if (!set.is_cantor() && !point)
        throw PreconditionError("dimension experiment needs a totally disconnected set (Cantor kinds or a point)");
    for (int n : resolutions)
        if (n < 9)
            throw ParameterError("resolutions", "dimension experiment needs n >= 9");

    const Rect frame = battery_frame(set);
    QcDimensionReport rep{set, {depths.begin(), depths.end()}, {resolutions.begin(), resolutions.end()}, {}};
    const std::size_t nn = resolutions.size();
    rep.cells.resize(depths.size() * nn);
    parallel_for(rep.cells.size(), opt.workers, [&](std::size_t k) {
        DimensionCell& c = rep.cells[k];
        c.depth = depths[k / nn];
        c.n = resolutions[k % nn];
        const double side = frame.width();
        const Grid g = Grid::square({frame.x0, frame.y0}, side, c.n);
        const PixelMask mask = rasterize(set, c.depth, g, RasterMode::clip);
        const int ladder = std::max(3, static_cast<int>(std::floor(std::log2(double(c.n - 1)))) - 1);
        try {
            c.euclidean = box_dimension(mask, dyadic_scales(0.5 * side, ladder));
            const ScalarField omega = eval_weight(distance_transform(mask), WeightSpec{WeightKind::lemma35, 2.0});
            const MetricGraph mg = MetricGraph::build(omega);
            const auto nodes = mask.nodes();
            c.weighted_diameter = weighted_diameter(mg, nodes).value;
            if (c.weighted_diameter > 0.0)
                c.weighted = box_dimension(mask, dyadic_scales(4.0 * c.weighted_diameter, ladder), &mg);
        } catch (const NumericError& e) {
            c.error = e.what();
        }
    });
    return rep;
}

} // namespace modlab
