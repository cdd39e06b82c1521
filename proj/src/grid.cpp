#include "modlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modlab/errors.hpp"

namespace modlab {

Grid::Grid(Point origin, double spacing, int nx, int ny) : origin_(origin), h_(spacing), nx_(nx), ny_(ny) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ParameterError("grid.h", "spacing must be positive and finite");
    if (nx < 3 || ny < 3)
        throw ParameterError("grid.n", "need at least 3 nodes per side");
}

Grid Grid::square(Point origin, double extent, int n) {
    if (n < 3)
        throw ParameterError("grid.n", "need at least 3 nodes per side");
    if (!(extent > 0.0))
        throw ParameterError("grid.extent", "extent must be positive");
    return Grid(origin, extent / (n - 1), n, n);
}

Grid Grid::covering(const Rect& r, int n) {
    if (n < 3)
        throw ParameterError("grid.n", "need at least 3 nodes per side");
    if (!(r.width() > 0.0) || !(r.height() > 0.0))
        throw GeometryError("cannot grid a degenerate rectangle");
    const double longest = std::max(r.width(), r.height());
    const double h = longest / (n - 1);
    const double cx = r.width() / h;
    const double cy = r.height() / h;
    const double rx = std::round(cx);
    const double ry = std::round(cy);
    if (std::abs(cx - rx) > 1e-9 * rx || std::abs(cy - ry) > 1e-9 * ry || rx < 2 || ry < 2)
        throw GeometryError("rectangle sides are not commensurate with the grid spacing at n=" +
                            std::to_string(n));
    return Grid({r.x0, r.y0}, h, static_cast<int>(rx) + 1, static_cast<int>(ry) + 1);
}

Rect Grid::extent() const {
    return {origin_.x, origin_.y, origin_.x + (nx_ - 1) * h_, origin_.y + (ny_ - 1) * h_};
}

bool Grid::covers(const Rect& r) const {
    if (r.empty())
        return true;
    const Rect e = extent();
    const double eps = 1e-9 * h_;
    return r.x0 >= e.x0 - eps && r.y0 >= e.y0 - eps && r.x1 <= e.x1 + eps && r.y1 <= e.y1 + eps;
}

PixelMask::PixelMask(Grid grid) : grid_(grid), occupied_(grid.size(), 0) {}

PixelMask::PixelMask(Grid grid, std::vector<std::uint8_t> occupied) : grid_(grid), occupied_(std::move(occupied)) {
    if (occupied_.size() != grid_.size())
        throw ParameterError("mask", "occupancy size does not match grid");
}

std::size_t PixelMask::count() const {
    return static_cast<std::size_t>(std::count_if(occupied_.begin(), occupied_.end(), [](auto v) { return v != 0; }));
}

std::vector<int> PixelMask::nodes() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < occupied_.size(); ++k)
        if (occupied_[k])
            out.push_back(static_cast<int>(k));
    return out;
}

ScalarField::ScalarField(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ParameterError("field", "value count does not match grid");
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b))
        throw GeometryError("fields live on different grids");
}

} // namespace modlab
