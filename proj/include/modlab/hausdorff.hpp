#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "modlab/grid.hpp"
#include "modlab/metric_graph.hpp"

namespace modlab {

enum class Normalizer {
    standard, // c(s) = pi^(s/2) / (2^s Gamma(s/2 + 1)); c(1) = 1, c(2) = pi/4
    unit      // c(s) = 1
};

double hausdorff_normalizer(double s, Normalizer n = Normalizer::standard);

struct HausdorffQuery {
    double s = 1.0;
    double scale_cap = std::numeric_limits<double>::infinity(); // +inf: content
    Normalizer normalizer = Normalizer::standard;
    const MetricGraph* weighted = nullptr; // nullptr: Euclidean

    void validate() const;
};

// Upper estimate of H^s_cap of the occupied set of `mask`, where the set is read as the
// union of the closed cells of its occupied nodes.
//   Euclidean: optimal cover over the dyadic class (a cover piece is the part of the set
//     inside a dyadic box), computed exactly by a quadtree recursion.
//   Weighted: greedy metric-ball covers over a ladder of radii; the cheapest is returned.
double content_upper(const PixelMask& mask, const HausdorffQuery& q);

struct ScaleCount {
    double scale = 0.0;
    std::size_t count = 0;
    double cover_sum = 0.0; // count * scale^slope
};

struct BoxDimension {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS of the log-log fit residuals
    std::vector<ScaleCount> counts;
};

// Number of side-`scale` boxes (anchored at the grid's lower-left cell corner) meeting
// the occupied nodes.
std::size_t box_count(const PixelMask& mask, double scale);
// Number of closed d_omega balls of radius scale/2 picked greedily (lowest uncovered
// node first) to cover the occupied nodes.
std::size_t ball_count(const PixelMask& mask, const MetricGraph& g, double scale);

// Least-squares slope of log N(scale) against log(1/scale). Requires >= 3 scales spanning
// at least two octaves.
BoxDimension box_dimension(const PixelMask& mask, std::span<const double> scales, const MetricGraph* weighted = nullptr);

// top, top/2, ..., for `count` scales.
std::vector<double> dyadic_scales(double top, int count);

// Diameter of the occupied node set (node centres), Euclidean.
double node_diameter(const PixelMask& mask);

bool is_8_connected(const PixelMask& mask);

// (H^1_inf estimate, diameter) for an 8-connected mask. Throws PreconditionError when the
// mask is disconnected.
std::pair<double, double> connected_content_identity_check(const PixelMask& mask);

} // namespace modlab
