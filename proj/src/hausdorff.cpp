#include "modlab/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "modlab/errors.hpp"

namespace modlab {

namespace {

struct IPt {
    long long x, y;
    friend bool operator<(const IPt& a, const IPt& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
    friend bool operator==(const IPt& a, const IPt& b) { return a.x == b.x && a.y == b.y; }
};

long long cross(const IPt& o, const IPt& a, const IPt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<IPt> convex_hull(std::vector<IPt> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2)
        return pts;
    std::vector<IPt> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0)
            --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0)
            --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

// Diameter, in cells, of the union of unit cells centred on the hull points.
double cell_union_diameter(const std::vector<IPt>& hull) {
    long long best = 0;
    for (std::size_t a = 0; a < hull.size(); ++a) {
        for (std::size_t b = a; b < hull.size(); ++b) {
            const long long dx = std::llabs(hull[a].x - hull[b].x) + 1;
            const long long dy = std::llabs(hull[a].y - hull[b].y) + 1;
            best = std::max(best, dx * dx + dy * dy);
        }
    }
    return std::sqrt(static_cast<double>(best));
}

struct Piece {
    double cost;
    std::vector<IPt> hull;
};

struct DyadicCover {
    double s, cap, c, h;

    double piece_cost(double diam_cells) const {
        const double d = diam_cells * h;
        if (!(d < cap))
            return std::numeric_limits<double>::infinity();
        return c * std::pow(d, s);
    }

    Piece solve(std::vector<IPt>& pts, long long x0, long long y0, int level) const {
        if (level == 0)
            return {piece_cost(std::sqrt(2.0)), {pts.front()}};
        const long long half = 1LL << (level - 1);
        std::vector<IPt> quad[4];
        for (const auto& p : pts)
            quad[(p.x >= x0 + half ? 1 : 0) + (p.y >= y0 + half ? 2 : 0)].push_back(p);
        pts.clear();
        pts.shrink_to_fit();
        double split = 0.0;
        std::vector<IPt> merged;
        for (int q = 0; q < 4; ++q) {
            if (quad[q].empty())
                continue;
            Piece child = solve(quad[q], x0 + ((q & 1) ? half : 0), y0 + ((q & 2) ? half : 0), level - 1);
            split += child.cost;
            merged.insert(merged.end(), child.hull.begin(), child.hull.end());
        }
        Piece out;
        out.hull = convex_hull(std::move(merged));
        out.cost = std::min(split, piece_cost(cell_union_diameter(out.hull)));
        return out;
    }
};

struct BallCover {
    std::size_t count = 0;
    double cost = 0.0;
    bool feasible = true;
};

// Greedy cover by closed d_omega balls of radius r centred at the lowest uncovered node.
BallCover greedy_balls(const MetricGraph& g, const std::vector<int>& nodes, double r, double s, double c, double cap) {
    BallCover out;
    std::vector<std::uint8_t> covered(g.grid().size(), 0);
    for (int p : nodes) {
        if (covered[p])
            continue;
        const int src[] = {p};
        const auto d = shortest_distances(g, src, r);
        double r_eff = 0.0, halo = 0.0;
        for (int v : nodes) {
            if (!d.reached(v))
                continue;
            if (!covered[v]) {
                r_eff = std::max(r_eff, d.value(v));
                g.for_each_edge(v, [&](int, Ticks w) { halo = std::max(halo, 0.5 * from_ticks(w)); });
            }
            covered[v] = 1;
        }
        ++out.count;
        const double diam = 2.0 * (r_eff + halo);
        if (!(diam < cap))
            out.feasible = false;
        out.cost += c * std::pow(diam, s);
    }
    return out;
}

} // namespace

double hausdorff_normalizer(double s, Normalizer n) {
    if (n == Normalizer::unit)
        return 1.0;
    return std::pow(std::numbers::pi, 0.5 * s) / (std::pow(2.0, s) * std::tgamma(0.5 * s + 1.0));
}

void HausdorffQuery::validate() const {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw ParameterError("hausdorff.s", "exponent must be >= 0");
    if (!(scale_cap > 0.0))
        throw ParameterError("hausdorff.scale_cap", "scale cap must be positive");
}

double content_upper(const PixelMask& mask, const HausdorffQuery& q) {
    q.validate();
    const auto nodes = mask.nodes();
    if (nodes.empty())
        return 0.0;
    const Grid& g = mask.grid();
    const double c = hausdorff_normalizer(q.s, q.normalizer);

    if (q.weighted == nullptr) {
        if (!(std::sqrt(2.0) * g.h() < q.scale_cap))
            throw DomainError("scale cap below the grid cell diameter");
        int level = 0;
        while ((1LL << level) < std::max(g.nx(), g.ny()))
            ++level;
        std::vector<IPt> pts;
        pts.reserve(nodes.size());
        for (int k : nodes)
            pts.push_back({g.col(k), g.row(k)});
        DyadicCover dp{q.s, q.scale_cap, c, g.h()};
        return dp.solve(pts, 0, 0, level).cost;
    }

    require_same_grid(q.weighted->grid(), g);
    double top = 0.0;
    {
        const int src[] = {nodes.front()};
        const auto d = shortest_distances(*q.weighted, src);
        for (int v : nodes)
            if (d.reached(v))
                top = std::max(top, d.value(v));
            else
                top = std::numeric_limits<double>::infinity();
    }
    double best = std::numeric_limits<double>::infinity();
    double r = std::isfinite(top) ? top : 1.0;
    for (int step = 0; step < 64 && r > 0.0; ++step, r *= 0.5) {
        if (std::isfinite(q.scale_cap) && !(2.0 * r < q.scale_cap))
            continue;
        const BallCover cover = greedy_balls(*q.weighted, nodes, r, q.s, c, q.scale_cap);
        if (cover.feasible)
            best = std::min(best, cover.cost);
        if (cover.count == nodes.size())
            break;
    }
    return best;
}

std::size_t box_count(const PixelMask& mask, double scale) {
    if (!(scale > 0.0))
        throw ParameterError("scale", "box scale must be positive");
    const Grid& g = mask.grid();
    const double ratio = scale / g.h();
    const double m = std::round(ratio);
    const bool integral = m >= 1.0 && std::abs(ratio - m) <= 1e-9 * m;
    std::vector<long long> keys;
    for (int k : mask.nodes()) {
        long long bx, by;
        if (integral) {
            bx = g.col(k) / static_cast<long long>(m);
            by = g.row(k) / static_cast<long long>(m);
        } else {
            bx = static_cast<long long>(std::floor((g.col(k) + 0.5) / ratio));
            by = static_cast<long long>(std::floor((g.row(k) + 0.5) / ratio));
        }
        keys.push_back(bx * 4294967296LL + by);
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::size_t ball_count(const PixelMask& mask, const MetricGraph& g, double scale) {
    if (!(scale > 0.0))
        throw ParameterError("scale", "ball scale must be positive");
    require_same_grid(mask.grid(), g.grid());
    const auto nodes = mask.nodes();
    std::vector<std::uint8_t> covered(mask.grid().size(), 0);
    std::size_t count = 0;
    for (int p : nodes) {
        if (covered[p])
            continue;
        const int src[] = {p};
        const auto d = shortest_distances(g, src, 0.5 * scale);
        for (int v : nodes)
            if (d.reached(v))
                covered[v] = 1;
        ++count;
    }
    return count;
}

std::vector<double> dyadic_scales(double top, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k)
        out.push_back(std::ldexp(top, -k));
    return out;
}

BoxDimension box_dimension(const PixelMask& mask, std::span<const double> scales, const MetricGraph* weighted) {
    if (scales.size() < 3)
        throw PreconditionError("box dimension needs at least 3 scales");
    const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
    if (!(*lo > 0.0) || *hi / *lo < 4.0 * (1.0 - 1e-12))
        throw PreconditionError("box dimension scales must span at least two octaves");
    BoxDimension out;
    std::vector<double> xs, ys;
    for (double e : scales) {
        const std::size_t n = weighted ? ball_count(mask, *weighted, e) : box_count(mask, e);
        out.counts.push_back({e, n, 0.0});
        xs.push_back(std::log(1.0 / e));
        ys.push_back(std::log(static_cast<double>(std::max<std::size_t>(n, 1))));
    }
    const double m = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (!(sxx > 0.0))
        throw NumericError("degenerate box-dimension regression: scales have zero variance");
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double rss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = ys[k] - (out.intercept + out.slope * xs[k]);
        rss += r * r;
    }
    out.residual = std::sqrt(rss / m);
    for (auto& sc : out.counts)
        sc.cover_sum = static_cast<double>(sc.count) * std::pow(sc.scale, out.slope);
    return out;
}

double node_diameter(const PixelMask& mask) {
    const Grid& g = mask.grid();
    std::vector<IPt> pts;
    for (int k : mask.nodes())
        pts.push_back({g.col(k), g.row(k)});
    if (pts.empty())
        return 0.0;
    const auto hull = convex_hull(std::move(pts));
    long long best = 0;
    for (std::size_t a = 0; a < hull.size(); ++a)
        for (std::size_t b = a + 1; b < hull.size(); ++b) {
            const long long dx = hull[a].x - hull[b].x, dy = hull[a].y - hull[b].y;
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(static_cast<double>(best)) * g.h();
}

bool is_8_connected(const PixelMask& mask) {
    const Grid& g = mask.grid();
    const auto nodes = mask.nodes();
    if (nodes.empty())
        return true;
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::queue<int> todo;
    todo.push(nodes.front());
    seen[nodes.front()] = 1;
    std::size_t reached = 1;
    while (!todo.empty()) {
        const int u = todo.front();
        todo.pop();
        for (const auto& nb : kNeighbours8) {
            const int a = g.col(u) + nb.di, b = g.row(u) + nb.dj;
            if (!g.inside(a, b))
                continue;
            const int v = g.index(a, b);
            if (mask.at(v) && !seen[v]) {
                seen[v] = 1;
                ++reached;
                todo.push(v);
            }
        }
    }
    return reached == nodes.size();
}

std::pair<double, double> connected_content_identity_check(const PixelMask& mask) {
    if (!is_8_connected(mask))
        throw PreconditionError("connected-set identity needs an 8-connected mask");
    if (mask.empty())
        return {0.0, 0.0};
    HausdorffQuery q;
    q.s = 1.0;
    return {content_upper(mask, q), node_diameter(mask)};
}

} // namespace modlab
