#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "modlab/grid.hpp"

namespace modlab {

enum class SetKind { cantor_line, cantor_product, fat_cantor, segment, polyline_arc, circle, raw_mask };

std::string to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& name);

// Generator description of a planar compact set. Line kinds live on the horizontal
// segment [anchor.x, anchor.x + length] x {anchor.y}; cantor_product lives on the square
// with lower-left corner `anchor` and side `length`.
struct CompactSetSpec {
    SetKind kind = SetKind::cantor_line;

    // Fraction of each interval removed from its middle (cantor_line, cantor_product).
    double ratio = 1.0 / 3.0;
    // fat_cantor: gap removed from every interval at stage k, as a fraction of `length`.
    // Empty means the default 4^{-k-1}.
    std::vector<double> gaps;

    Point anchor{0.0, 0.0};
    double length = 1.0;

    Point a{0.0, 0.0}, b{1.0, 0.0}; // segment
    std::vector<Point> vertices;    // polyline_arc
    Point center{0.0, 0.0};         // circle
    double radius = 1.0;

    std::shared_ptr<const PixelMask> mask; // raw_mask

    static CompactSetSpec cantor_line(double ratio, Point anchor = {0.0, 0.0}, double length = 1.0);
    static CompactSetSpec cantor_product(double ratio, Point anchor = {0.0, 0.0}, double length = 1.0);
    static CompactSetSpec fat_cantor(Point anchor = {0.0, 0.0}, double length = 1.0, std::vector<double> gaps = {});
    static CompactSetSpec segment(Point a, Point b);
    static CompactSetSpec polyline(std::vector<Point> vertices);
    static CompactSetSpec circle(Point center, double radius);
    static CompactSetSpec raw(PixelMask mask);

    bool is_cantor() const {
        return kind == SetKind::cantor_line || kind == SetKind::cantor_product || kind == SetKind::fat_cantor;
    }

    // Throws ParameterError naming the first invalid field.
    void validate() const;
    // Gap (absolute length) removed at stage k for fat_cantor.
    double fat_gap(int stage) const;
    Rect bounding_box() const;
};

// Closed axis-aligned box; degenerate boxes describe intervals and points.
using Box = Rect;

struct Segment {
    Point a, b;
};

struct Circle {
    Point center;
    double radius;
};

// Finite description of one generation of a set.
struct Generation {
    std::vector<Box> boxes;
    std::vector<Segment> segments;
    std::vector<Circle> circles;

    std::size_t piece_count() const { return boxes.size() + segments.size() + circles.size(); }
};

// One-dimensional stage-`depth` intervals of a Cantor-type construction on [lo, hi].
std::vector<std::pair<double, double>> cantor_intervals(const CompactSetSpec& spec, int depth);

Generation generate(const CompactSetSpec& spec, int depth);

enum class RasterMode {
    strict, // grid must cover the bounding box
    clip    // parts of the set outside the grid are dropped
};

PixelMask rasterize(const CompactSetSpec& spec, int depth, const Grid& grid, RasterMode mode = RasterMode::strict);
PixelMask rasterize(const Generation& gen, const Grid& grid);

// Mask file: header `MODLAB-MASK v1 n=<int> origin=<f>,<f> extent=<f>,<f> occupied=<int>`,
// then n newline-terminated rows of n characters in {0,1}; row r holds nodes with j = r.
void save_mask(const PixelMask& mask, const std::filesystem::path& path);
PixelMask load_mask(const std::filesystem::path& path);
std::string mask_to_string(const PixelMask& mask);
PixelMask mask_from_string(const std::string& text);

} // namespace modlab
