#include "modlab/metric_graph.hpp"

#include <algorithm>
#include <queue>
#include <utility>

#include "modlab/errors.hpp"
#include "modlab/weight_engine.hpp"

namespace modlab {

namespace {

constexpr long double kTickScale = 79228162514264337593543950336.0L; // 2^96
constexpr double kMaxLength = 1073741824.0;                         // 2^30

using Entry = std::pair<Ticks, int>;
using MinQueue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

ShortestPathTree run_dijkstra(const MetricGraph& g, std::span<const int> sources, Ticks bound, bool want_parents) {
    if (sources.empty())
        throw DomainError("shortest distances need a nonempty source set");
    const Grid& grid = g.grid();
    ShortestPathTree t{DistanceField{grid, {sources.begin(), sources.end()}, std::vector<Ticks>(grid.size(), kUnreached)},
                       {}};
    if (want_parents)
        t.parent.assign(grid.size(), -1);
    std::vector<std::uint8_t> done(grid.size(), 0);
    MinQueue pq;
    for (int s : sources) {
        if (s < 0 || static_cast<std::size_t>(s) >= grid.size())
            throw DomainError("source node outside the grid");
        if (g.blocked(s))
            continue;
        if (t.dist.ticks[s] != 0) {
            t.dist.ticks[s] = 0;
            pq.emplace(0, s);
        }
    }
    auto& dist = t.dist.ticks;
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u] || d != dist[u])
            continue;
        if (d > bound)
            break;
        done[u] = 1;
        g.for_each_edge(u, [&](int v, Ticks w) {
            if (done[v])
                return;
            const Ticks nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                if (want_parents)
                    t.parent[v] = u;
                pq.emplace(nd, v);
            }
        });
    }
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!done[k]) {
            dist[k] = kUnreached;
            if (want_parents)
                t.parent[k] = -1;
        }
    }
    return t;
}

} // namespace

Ticks to_ticks(double length) {
    if (!(length >= 0.0) || length > kMaxLength)
        throw DomainError("graph length out of range");
    long double scaled = static_cast<long double>(length) * kTickScale;
    return static_cast<Ticks>(std::nearbyint(scaled));
}

double from_ticks(Ticks t) { return static_cast<double>(static_cast<long double>(t) / kTickScale); }

MetricGraph::MetricGraph(Grid grid, std::vector<double> omega, std::vector<std::uint8_t> blocked)
    : grid_(grid), omega_(std::move(omega)), blocked_(std::move(blocked)) {}

MetricGraph MetricGraph::build(const ScalarField& omega) { return build(omega, {}); }

MetricGraph MetricGraph::build(const ScalarField& omega, std::vector<std::uint8_t> blocked) {
    const Grid& g = omega.grid();
    if (!blocked.empty() && blocked.size() != g.size())
        throw ParameterError("blocked", "mask size does not match grid");
    double top = 0.0;
    for (double w : omega.values()) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw DomainError("weights must be finite and non-negative");
        top = std::max(top, w);
    }
    // Every path sum must stay below 2^30 length units.
    if (top * std::sqrt(2.0) * g.h() * 4.0 * static_cast<double>(g.size()) >= kMaxLength)
        throw DomainError("weights too large for exact graph lengths");
    return MetricGraph(g, omega.values(), std::move(blocked));
}

ScalarField DistanceField::to_field() const {
    ScalarField f(grid);
    for (std::size_t k = 0; k < ticks.size(); ++k)
        f[k] = value(static_cast<int>(k));
    return f;
}

std::vector<int> ShortestPathTree::path_to(int target) const {
    if (!dist.reached(target))
        return {};
    std::vector<int> path;
    for (int v = target; v != -1; v = parent[v])
        path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

DistanceField shortest_distances(const MetricGraph& g, std::span<const int> sources, double bound) {
    const Ticks b = std::isfinite(bound) ? to_ticks(bound) : kUnreached - 1;
    return run_dijkstra(g, sources, b, false).dist;
}

ShortestPathTree shortest_path_tree(const MetricGraph& g, std::span<const int> sources) {
    return run_dijkstra(g, sources, kUnreached - 1, true);
}

double graph_distance(const MetricGraph& g, int a, int b) {
    const int s = std::min(a, b), t = std::max(a, b);
    const int src[] = {s};
    return shortest_distances(g, src).value(t);
}

double lemma35_tolerance(double h, double radius, double p) { return 4.0 * h * std::pow(radius, p); }

double lemma35_distance_bound(const MetricGraph& g, int y, double radius, double p) {
    if (!(p > 1.0) || !(radius > 0.0) || !(radius < 1.0 / p))
        throw PreconditionError("distance bound needs 0 < radius < 1/p < 1");
    const auto ball = ball_nodes(g.grid(), y, radius);
    const int src[] = {y};
    const auto d = shortest_distances(g, src);
    const double analytic = std::pow(radius, p + 1.0) / (p + 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int x : ball)
        worst = std::max(worst, d.value(x) - analytic);
    return worst;
}

WeightedDiameter weighted_diameter(const MetricGraph& g, std::span<const int> nodes, std::size_t exact_limit) {
    WeightedDiameter out;
    if (nodes.empty())
        throw DomainError("diameter of an empty set");
    auto farthest = [&](int from) {
        const int src[] = {from};
        const auto d = shortest_distances(g, src);
        int best = from;
        Ticks bt = 0;
        for (int v : nodes) {
            if (d.ticks[v] != kUnreached && d.ticks[v] > bt) {
                bt = d.ticks[v];
                best = v;
            }
        }
        return std::pair{best, bt};
    };
    if (nodes.size() <= exact_limit) {
        Ticks best = 0;
        out.a = out.b = nodes[0];
        for (int s : nodes) {
            auto [v, t] = farthest(s);
            if (t > best) {
                best = t;
                out.a = s;
                out.b = v;
            }
        }
        out.value = from_ticks(best);
        out.exact = true;
        return out;
    }
    auto [a, ta] = farthest(nodes[0]);
    auto [b, tb] = farthest(a);
    out.a = a;
    out.b = b;
    out.value = from_ticks(std::max(ta, tb));
    out.exact = false;
    return out;
}

} // namespace modlab
