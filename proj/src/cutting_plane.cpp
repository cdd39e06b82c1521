#include <algorithm>
#include <cmath>
#include <limits>

#include "modlab/errors.hpp"
#include "modlab/metric_graph.hpp"
#include "modlab/modulus.hpp"

namespace modlab {

namespace {

struct Term {
    int var;
    double c;
};

struct Constraint {
    std::vector<Term> terms;
    double gkk = 0.0; // sum c^2 / a
    double lambda = 0.0;
};

double dual_cell_area(const Grid& g, int k) {
    const int i = g.col(k), j = g.row(k);
    const double fx = (i == 0 || i == g.nx() - 1) ? 0.5 : 1.0;
    const double fy = (j == 0 || j == g.ny() - 1) ? 0.5 : 1.0;
    return fx * fy * g.h() * g.h();
}

} // namespace

std::string to_string(CurveFamilySpec::Kind kind) {
    switch (kind) {
    case CurveFamilySpec::Kind::quad_primal: return "quad_primal";
    case CurveFamilySpec::Kind::quad_dual: return "quad_dual";
    case CurveFamilySpec::Kind::annulus: return "annulus";
    case CurveFamilySpec::Kind::custom: return "custom";
    }
    return "?";
}

void CurveFamilySpec::validate() const {
    if (removed)
        require_same_grid(removed->grid(), region);
    if (length_weight) {
        require_same_grid(length_weight->grid(), region);
        for (double w : length_weight->values())
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ParameterError("length_weight", "weights must be finite and non-negative");
    }
    switch (kind) {
    case Kind::quad_primal:
    case Kind::quad_dual: {
        const Rect e = region.extent();
        const double eps = 1e-9 * region.h();
        if (std::abs(e.x0 - quad.rect.x0) > eps || std::abs(e.y0 - quad.rect.y0) > eps ||
            std::abs(e.x1 - quad.rect.x1) > eps || std::abs(e.y1 - quad.rect.y1) > eps)
            throw GeometryError("grid does not span the quadrilateral");
        break;
    }
    case Kind::annulus:
        if (!(r < R))
            throw ParameterError("R", "annulus needs r < R");
        if (!(r > 0.0))
            throw ParameterError("r", "must be positive");
        break;
    case Kind::custom: {
        if (source.empty())
            throw ParameterError("source", "empty node set");
        if (target.empty())
            throw ParameterError("target", "empty node set");
        for (const auto* set : {&source, &target})
            for (int k : *set) {
                if (k < 0 || static_cast<std::size_t>(k) >= region.size())
                    throw ParameterError("source/target", "node outside the region");
                if (removed && removed->at(k))
                    throw ParameterError("removed", "removed set meets source or target");
            }
        break;
    }
    }
}

std::pair<std::vector<int>, std::vector<int>> CurveFamilySpec::endpoints() const {
    std::vector<int> s, t;
    switch (kind) {
    case Kind::quad_primal:
        s = side_nodes(region, quad.side(1));
        t = side_nodes(region, quad.side(3));
        break;
    case Kind::quad_dual:
        s = side_nodes(region, quad.side(2));
        t = side_nodes(region, quad.side(4));
        break;
    case Kind::annulus:
        for (std::size_t k = 0; k < region.size(); ++k) {
            const Point p = region.node(static_cast<int>(k));
            const double d = std::hypot(p.x - center.x, p.y - center.y);
            if (d <= r)
                s.push_back(static_cast<int>(k));
            else if (d >= R)
                t.push_back(static_cast<int>(k));
        }
        break;
    case Kind::custom:
        s = source;
        t = target;
        break;
    }
    auto drop_removed = [&](std::vector<int>& v) {
        if (removed)
            std::erase_if(v, [&](int k) { return removed->at(k); });
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    drop_removed(s);
    drop_removed(t);
    return {s, t};
}

ModulusResult family_modulus_cutting_plane(const CurveFamilySpec& f, const CuttingPlaneOptions& opt) {
    if (!(opt.tol > 0.0) || !(opt.tol < 1.0))
        throw ParameterError("tol", "must lie in (0, 1)");
    if (opt.max_paths < 1)
        throw ParameterError("max_paths", "must be positive");
    if (opt.paths_per_round < 1)
        throw ParameterError("paths_per_round", "must be positive");
    f.validate();
    const Grid& g = f.region;
    const std::size_t n = g.size();
    const double inner_tol = opt.inner_tol > 0.0 ? opt.inner_tol : 0.1 * opt.tol;

    ModulusResult res{0.0, ScalarField(g), 0, 0.0, SolverKind::cutting_plane, true, false, false, opt.tol,
                      std::max(g.nx(), g.ny()), {}};

    auto [src, tgt] = f.endpoints();
    if (src.empty() || tgt.empty()) {
        res.no_curves = true;
        res.note = "family of no rectifiable admissible curves";
        return res;
    }
    std::vector<std::uint8_t> is_target(n, 0);
    for (int k : tgt)
        is_target[k] = 1;
    for (int k : src)
        if (is_target[k]) {
            res.value = std::numeric_limits<double>::infinity();
            res.divergent = true;
            res.note = "family contains a constant curve";
            return res;
        }

    std::vector<double> omega(n, 1.0);
    if (f.length_weight)
        omega = f.length_weight->values();
    std::vector<std::uint8_t> blocked;
    if (f.removed)
        blocked = f.removed->data();

    std::vector<double> area(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        area[k] = omega[k] * omega[k] * dual_cell_area(g, static_cast<int>(k));

    std::vector<double> rho(n, 0.0);
    std::vector<Constraint> cons;
    auto length_of = [&](const Constraint& c) {
        double s = 0.0;
        for (const Term& t : c.terms)
            s += t.c * rho[t.var];
        return s;
    };

    // Coordinate ascent on the dual of min 1/2 sum a rho^2 s.t. c_k . rho >= 1.
    auto resolve = [&]() {
        for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            double worst = 0.0;
            for (Constraint& c : cons) {
                const double len = length_of(c);
                const double viol = c.lambda > 0.0 ? std::abs(1.0 - len) : std::max(0.0, 1.0 - len);
                worst = std::max(worst, viol);
                const double next = std::max(0.0, c.lambda + (1.0 - len) / c.gkk);
                const double d = next - c.lambda;
                if (d == 0.0)
                    continue;
                c.lambda = next;
                for (const Term& t : c.terms)
                    rho[t.var] += d * t.c / area[t.var];
            }
            if (worst <= inner_tol)
                return;
        }
    };

    while (true) {
        ScalarField weight(g);
        for (std::size_t k = 0; k < n; ++k)
            weight[k] = std::max(0.0, rho[k]) * omega[k];
        const MetricGraph mg = MetricGraph::build(weight, blocked);
        const ShortestPathTree tree = shortest_path_tree(mg, src);
        int best = -1;
        for (int k : tgt)
            if (tree.dist.reached(k) && (best < 0 || tree.dist.ticks[k] < tree.dist.ticks[best]))
                best = k;
        if (best < 0) {
            res.no_curves = true;
            res.note = "family of no rectifiable admissible curves";
            res.value = 0.0;
            res.certificate = std::numeric_limits<double>::infinity();
            return res;
        }
        const double shortest = tree.dist.value(best);
        res.certificate = shortest;
        if (shortest >= 1.0 - opt.tol)
            break;
        if (static_cast<int>(cons.size()) >= opt.max_paths) {
            res.converged = false;
            res.note = "not converged";
            break;
        }

        // Violated curves ending at distinct target nodes, shortest first.
        std::vector<int> ends;
        const Ticks cut = to_ticks(1.0 - opt.tol);
        for (int k : tgt)
            if (tree.dist.reached(k) && tree.dist.ticks[k] < cut)
                ends.push_back(k);
        std::sort(ends.begin(), ends.end(), [&](int a, int b) {
            return tree.dist.ticks[a] != tree.dist.ticks[b] ? tree.dist.ticks[a] < tree.dist.ticks[b] : a < b;
        });
        const int room = std::min(opt.paths_per_round, opt.max_paths - static_cast<int>(cons.size()));

        // Curves in one round are kept node-disjoint.
        std::vector<std::uint8_t> used(n, 0);
        std::vector<double> coef(n, 0.0);
        int added = 0;
        for (int end : ends) {
            if (added >= room)
                break;
            const std::vector<int> path = tree.path_to(end);
            if (added > 0 && std::any_of(path.begin(), path.end(), [&](int v) { return used[v] != 0; }))
                continue;
            for (int v : path)
                used[v] = 1;
            ++added;
            // Trapezoid coefficients: each path edge contributes |e|/2 to both endpoints.
            for (std::size_t s = 0; s + 1 < path.size(); ++s) {
                const int u = path[s], v = path[s + 1];
                const bool diag = g.col(u) != g.col(v) && g.row(u) != g.row(v);
                const double half = 0.5 * g.h() * (diag ? std::sqrt(2.0) : 1.0);
                coef[u] += half;
                coef[v] += half;
            }
            Constraint c;
            for (int v : path) {
                if (coef[v] == 0.0)
                    continue;
                const double cv = omega[v] * coef[v];
                coef[v] = 0.0;
                if (cv == 0.0 || area[v] == 0.0)
                    continue;
                c.terms.push_back({v, cv});
                c.gkk += cv * cv / area[v];
            }
            if (c.terms.empty()) {
                res.value = std::numeric_limits<double>::infinity();
                res.divergent = true;
                res.note = "family contains a curve of zero weighted length";
                res.certificate = 0.0;
                res.iterations = static_cast<int>(cons.size());
                return res;
            }
            cons.push_back(std::move(c));
        }
        resolve();
    }
    res.iterations = static_cast<int>(cons.size());

    double energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        energy += area[k] * rho[k] * rho[k];
        res.rho[k] = rho[k];
    }
    res.value = energy;
    return res;
}

} // namespace modlab
