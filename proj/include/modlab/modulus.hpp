#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modlab/grid.hpp"

namespace modlab {

enum class Side { left, bottom, right, top };

std::string to_string(Side side);

// Rectangle with four marked sides zeta_1..zeta_4 in counterclockwise order starting at
// `first` (left, bottom, right, top when first == left). Gamma(Q) joins zeta_1 to zeta_3.
struct Quadrilateral {
    Rect rect;
    Side first = Side::left;

    Side side(int k) const; // k in 1..4
    // Re-marked quadrilateral whose connecting family is Gamma*(Q) = Gamma(zeta_2, zeta_4).
    Quadrilateral dual() const { return {rect, side(2)}; }
};

// Nodes of the grid lying on one side of its extent.
std::vector<int> side_nodes(const Grid& grid, Side side);

enum class SolverKind { conductance, cutting_plane };
std::string to_string(SolverKind kind);

struct ModulusResult {
    double value = 0.0; // +inf for a family containing a zero-length curve
    ScalarField rho;    // optimal density (1/length)
    int iterations = 0;
    double certificate = 1.0; // min rho-length over the family at termination
    SolverKind solver = SolverKind::conductance;
    bool converged = true;
    bool divergent = false; // value is +inf
    bool no_curves = false; // family has no admissible curves, value 0
    double tolerance = 0.0;
    int grid_n = 0;
    std::string note;
};

struct ConductanceOptions {
    double rel_tol = 1e-10;
    // CG iteration cap as a multiple of max(nx, ny)^2.
    double max_iter_factor = 10.0;
};

// Dirichlet-energy modulus of Gamma(zeta_1, zeta_3; Q minus removed) on the 5-point lattice
// with finite-volume edge conductances (1 inside, 1/2 along the outer boundary). The grid
// must span exactly q.rect.
ModulusResult quad_modulus_conductance(const Quadrilateral& q, const Grid& grid, const PixelMask* removed = nullptr,
                                       const ConductanceOptions& opt = {});

// Modulus of the family joining |x - center| <= r to |x - center| >= R.
ModulusResult annulus_modulus(Point center, double r, double R, const Grid& grid, const ConductanceOptions& opt = {});

// Modulus of the family joining the occupied set of `set_mask` to the ball B(center, r),
// inside the grid. Requires B(center, R) to miss the set.
ModulusResult small_ball_decay(const PixelMask& set_mask, Point center, double r, double R,
                               const ConductanceOptions& opt = {});

// Lower-level entry point: node states are 0 = free, 1 = potential 0, 2 = potential 1,
// 3 = deleted.
enum class NodeState : std::uint8_t { free = 0, low = 1, high = 2, deleted = 3 };
ModulusResult conductance_modulus(const Grid& grid, const std::vector<NodeState>& state,
                                  const ConductanceOptions& opt = {});

} // namespace modlab

namespace modlab {

struct CurveFamilySpec {
    enum class Kind { quad_primal, quad_dual, annulus, custom };

    Kind kind = Kind::quad_primal;
    Grid region;                    // the curves live on this grid's nodes
    Quadrilateral quad{};           // quad kinds; must span the region
    Point center{};                 // annulus
    double r = 0.0, R = 0.0;        // annulus
    std::vector<int> source{}, target{}; // custom
    std::optional<PixelMask> removed{};
    // Weighted admissibility; the area density is then omega^2.
    std::optional<ScalarField> length_weight{};

    void validate() const;
    // Source and target node sets, removed nodes excluded.
    std::pair<std::vector<int>, std::vector<int>> endpoints() const;
};

std::string to_string(CurveFamilySpec::Kind kind);

struct CuttingPlaneOptions {
    double tol = 1e-3;            // stop once every curve has rho-length >= 1 - tol
    int max_paths = 5000;
    int paths_per_round = 16;     // violated curves added per shortest-path sweep
    double inner_tol = -1.0;      // dual re-solve accuracy; negative means tol / 10
    long max_sweeps = 200000;     // per dual re-solve
};

// Direct optimisation of the modulus program over node densities. Each round adds the
// current shortest curve (8-connected node path, trapezoid length of rho * omega) as a
// constraint and re-solves the restricted quadratic program by coordinate ascent on its
// dual. The area element of a node is omega^2 times its dual-cell area (h^2 inside, h^2/2
// on edges, h^2/4 at corners).
ModulusResult family_modulus_cutting_plane(const CurveFamilySpec& f, const CuttingPlaneOptions& opt = {});

} // namespace modlab
