#pragma once

#include <filesystem>
#include <string>

#include "modlab/grid.hpp"

namespace modlab {

enum class WeightKind {
    lemma35,              // min{delta^(1/delta), 1}, vanishing on the set
    power,                // min{delta^p, 1}
    indicator_complement, // 1 off the set, 0 on it
};

std::string to_string(WeightKind kind);
WeightKind weight_kind_from_string(const std::string& name);

struct WeightSpec {
    WeightKind kind = WeightKind::lemma35;
    double p = 2.0; // power kind only

    void validate() const;
};

// Values below this are flushed to zero when evaluating delta^(1/delta).
inline constexpr double kWeightUnderflow = 1e-300;

// Exact Euclidean distance from every node to the nearest occupied node, in length units.
// Separable two-pass lower-envelope transform on squared integer offsets.
// Throws DomainError on an empty mask.
ScalarField distance_transform(const PixelMask& mask);

double weight_value(double delta, const WeightSpec& spec);
ScalarField eval_weight(const ScalarField& delta, const WeightSpec& spec);

// True iff omega <= delta^p (plus a few ulps) on every node of the closed ball of radius
// `radius` about node `center`. Requires radius < 1/p < 1.
bool weight_bound_check(const ScalarField& delta, const ScalarField& omega, double p, int center, double radius);

// Ball of radius `radius` about node `center` must lie in the grid; returns its nodes.
std::vector<int> ball_nodes(const Grid& grid, int center, double radius);

// 16-bit binary PGM, linearly scaled by the field maximum; the scale is recorded in a
// comment line. Positive values never map to 0 so the zero set survives quantisation.
std::string field_to_pgm(const ScalarField& field);
void save_pgm(const ScalarField& field, const std::filesystem::path& path);

// CSV with a leading `# MODLAB-FIELD ...` geometry comment, an `i,j,value` header and one
// row per node.
std::string field_to_csv(const ScalarField& field);
ScalarField field_from_csv(const std::string& text);
void save_csv(const ScalarField& field, const std::filesystem::path& path);
ScalarField load_csv(const std::filesystem::path& path);

} // namespace modlab
