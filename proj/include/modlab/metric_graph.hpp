#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "modlab/grid.hpp"

namespace modlab {

// Graph lengths are fixed-point integers with quantum 2^-96 so that path sums are exact:
// symmetry and the triangle inequality hold without rounding slack.
using Ticks = __int128;
inline constexpr int kTickBits = 96;
inline constexpr Ticks kUnreached = std::numeric_limits<Ticks>::max();

Ticks to_ticks(double length);
double from_ticks(Ticks t);

struct Neighbour {
    int di, dj;
    double unit_length; // 1 or sqrt(2), in cells
};

inline const std::array<Neighbour, 8> kNeighbours8 = {{
    {1, 0, 1.0},
    {-1, 0, 1.0},
    {0, 1, 1.0},
    {0, -1, 1.0},
    {1, 1, std::sqrt(2.0)},
    {-1, 1, std::sqrt(2.0)},
    {1, -1, std::sqrt(2.0)},
    {-1, -1, std::sqrt(2.0)},
}};

// 8-connected grid graph realising d_omega. The edge (u,v) has weight
// |u-v| (omega(u) + omega(v)) / 2, the trapezoid rule for the omega-length of the edge.
// Blocked nodes carry no edges.
class MetricGraph {
public:
    static MetricGraph build(const ScalarField& omega);
    static MetricGraph build(const ScalarField& omega, std::vector<std::uint8_t> blocked);

    const Grid& grid() const { return grid_; }
    double omega(int k) const { return omega_[k]; }
    bool blocked(int k) const { return !blocked_.empty() && blocked_[k] != 0; }

    double edge_weight(int u, int v, double unit_length) const {
        return unit_length * grid_.h() * (0.5 * (omega_[u] + omega_[v]));
    }

    // Calls f(v, weight_ticks) for every unblocked neighbour v of u.
    template <class F>
    void for_each_edge(int u, F&& f) const {
        const int i = grid_.col(u), j = grid_.row(u);
        for (const auto& nb : kNeighbours8) {
            const int a = i + nb.di, b = j + nb.dj;
            if (!grid_.inside(a, b))
                continue;
            const int v = grid_.index(a, b);
            if (blocked(v))
                continue;
            f(v, to_ticks(edge_weight(u, v, nb.unit_length)));
        }
    }

private:
    MetricGraph(Grid grid, std::vector<double> omega, std::vector<std::uint8_t> blocked);

    Grid grid_;
    std::vector<double> omega_;
    std::vector<std::uint8_t> blocked_;
};

// Graph distance from a source set.
struct DistanceField {
    Grid grid;
    std::vector<int> sources;
    std::vector<Ticks> ticks;

    bool reached(int k) const { return ticks[k] != kUnreached; }
    double value(int k) const {
        return reached(k) ? from_ticks(ticks[k]) : std::numeric_limits<double>::infinity();
    }
    // Unreached nodes become +inf.
    ScalarField to_field() const;
};

struct ShortestPathTree {
    DistanceField dist;
    std::vector<int> parent; // -1 at sources and unreached nodes

    // Node sequence from a source to `target`.
    std::vector<int> path_to(int target) const;
};

// Multi-source Dijkstra. Equal keys pop in increasing node index, so zero-weight plateaus
// are settled deterministically. Nodes farther than `bound` are reported unreached.
// Throws DomainError on an empty source set.
DistanceField shortest_distances(const MetricGraph& g, std::span<const int> sources,
                                 double bound = std::numeric_limits<double>::infinity());
ShortestPathTree shortest_path_tree(const MetricGraph& g, std::span<const int> sources);

// d_omega between two nodes, always computed from the lower-index endpoint.
double graph_distance(const MetricGraph& g, int a, int b);

// max over nodes x of the closed ball B(y, radius) of d_omega(y, x) - radius^(p+1)/(p+1).
// Requires radius < 1/p < 1 and the ball inside the grid.
double lemma35_distance_bound(const MetricGraph& g, int y, double radius, double p);

// Quadrature tolerance used against lemma35_distance_bound: C * h * radius^p with C = 4,
// covering the trapezoid error and the 8-neighbour path excess (at most ~8.3%).
double lemma35_tolerance(double h, double radius, double p);

struct WeightedDiameter {
    double value = 0.0;
    bool exact = true; // false: two-sweep lower bound
    int a = -1, b = -1;
};

// Diameter of a node set in the graph metric. Exact (one Dijkstra per member) up to
// `exact_limit` members, two-sweep lower bound beyond that.
WeightedDiameter weighted_diameter(const MetricGraph& g, std::span<const int> nodes, std::size_t exact_limit = 64);

} // namespace modlab
