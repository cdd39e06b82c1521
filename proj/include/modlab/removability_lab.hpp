#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modlab/hausdorff.hpp"
#include "modlab/modulus.hpp"
#include "modlab/set_library.hpp"
#include "modlab/weight_engine.hpp"

namespace modlab {

struct BatteryQuad {
    std::string id;
    Quadrilateral quad;
};

// Square of side D = max(width, height) centred on the set, used to scale the battery.
// An empty raw mask falls back to its grid extent, a point to the unit square about it.
Rect battery_frame(const CompactSetSpec& set);

// h_cross (2D x D, left to right), v_cross (D x 2D, bottom to top), the two crossings offset
// by D/4, and square frames of side 1.5D and 2D (left to right), all centred on the frame.
std::vector<BatteryQuad> default_battery(const Rect& frame);
// Subset of the default battery by id; throws ParameterError on an unknown id.
std::vector<BatteryQuad> select_battery(const Rect& frame, std::span<const std::string> ids);

// Grid with n nodes along the longer side of the quadrilateral.
Grid quad_grid(const Quadrilateral& q, int n);

struct LabOptions {
    int workers = 1;
    std::filesystem::path heatmap_dir; // non-empty: write the optimal density of each cell as PGM
    ConductanceOptions conductance{};
    CuttingPlaneOptions cutting_plane{};
};

struct DeficiencyCell {
    std::string quad_id;
    int depth = 0;
    int n = 0;
    double mod_full = 0.0;
    double mod_removed = 0.0;
    double ratio = 0.0;
    std::size_t removed_nodes = 0;
    std::string error; // non-empty when a solve failed
};

struct DeficiencyReport {
    CompactSetSpec set;
    std::vector<int> depths;
    std::vector<int> resolutions;
    std::vector<BatteryQuad> battery;
    std::vector<DeficiencyCell> cells; // ordered by (depth, quad, n)

    // Sign of the last ratio difference across resolutions for (quad, depth): +1, 0, -1.
    int trend(const std::string& quad_id, int depth) const;
    std::vector<double> ratios(const std::string& quad_id, int depth) const;
    bool failed() const;
};

// Ratio mod Gamma(zeta_1, zeta_3; Q minus E) / mod Gamma(Q) for every quad, depth and
// resolution. Throws PreconditionError naming the quad when zeta_1 or zeta_3 meets the set.
DeficiencyReport ab_deficiency(const CompactSetSpec& set, std::span<const int> depths,
                               std::span<const BatteryQuad> battery, std::span<const int> resolutions,
                               const LabOptions& opt = {});

struct ReciprocalityCell {
    std::string quad_id;
    int depth = 0;
    int n = 0;
    double mod = 0.0;      // weighted modulus of Gamma(Q)
    double mod_dual = 0.0; // weighted modulus of Gamma*(Q)
    double product = 0.0;
    bool converged = true;
    bool divergent = false;
    int paths = 0;
    std::string error;
};

struct ReciprocalityReport {
    CompactSetSpec set;
    WeightSpec weight;
    std::vector<int> depths;
    std::vector<int> resolutions;
    std::vector<BatteryQuad> battery;
    std::vector<ReciprocalityCell> cells;

    std::vector<double> products(const std::string& quad_id, int depth) const;
    bool failed() const;
    bool all_converged() const;
};

// Weighted modulus of Gamma(Q) and Gamma*(Q) under length weight omega (area density
// omega^2), omega evaluated from the rasterised set on each quad grid. An empty set gives
// omega = 1.
ReciprocalityReport reciprocality_probe(const CompactSetSpec& set, const WeightSpec& weight,
                                        std::span<const int> depths, std::span<const BatteryQuad> battery,
                                        std::span<const int> resolutions, const LabOptions& opt = {});

struct DimensionCell {
    int depth = 0;
    int n = 0;
    BoxDimension euclidean;
    BoxDimension weighted;
    double weighted_diameter = 0.0;
    std::string error;
};

struct QcDimensionReport {
    CompactSetSpec set;
    std::vector<int> depths;
    std::vector<int> resolutions;
    std::vector<DimensionCell> cells; // ordered by (depth, n)

    bool failed() const;
};

// Box dimension of the set in the Euclidean metric and in d_omega for the lemma35 weight,
// on a square grid of side D around the set. Both ladders have K = log2(n - 1) - 1 scales
// halving from D / 2 (Euclidean) and from 4 diam_omega (weighted; the diameter may be a
// two-sweep lower bound, which is at least half the true value). Cantor kinds and single
// points only.
QcDimensionReport qc_dimension_experiment(const CompactSetSpec& set, std::span<const int> depths,
                                          std::span<const int> resolutions, const LabOptions& opt = {});

} // namespace modlab
