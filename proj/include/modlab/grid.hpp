#pragma once

#include <cstdint>
#include <vector>

namespace modlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

// Closed axis-aligned rectangle; degenerate (zero width or height) rectangles are allowed.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    bool empty() const { return x1 < x0 || y1 < y0; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

// Uniform node lattice: node (i, j) sits at origin + (i*h, j*h), 0 <= i < nx, 0 <= j < ny.
class Grid {
public:
    Grid(Point origin, double spacing, int nx, int ny);

    // n x n nodes covering [origin, origin + extent]^2.
    static Grid square(Point origin, double extent, int n);

    // Nodes exactly covering `r`, with `n` nodes along the longer side. The shorter
    // side must be an integral number of cells.
    static Grid covering(const Rect& r, int n);

    Point origin() const { return origin_; }
    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

    int index(int i, int j) const { return j * nx_ + i; }
    int col(int k) const { return k % nx_; }
    int row(int k) const { return k / nx_; }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
    Point node(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
    Point node(int k) const { return node(col(k), row(k)); }
    Rect extent() const;

    bool covers(const Rect& r) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Point origin_;
    double h_;
    int nx_;
    int ny_;
};

// Occupancy of a compact set at grid resolution: occupied iff the closed cell of side h
// centred at the node meets the set.
class PixelMask {
public:
    explicit PixelMask(Grid grid);
    PixelMask(Grid grid, std::vector<std::uint8_t> occupied);

    const Grid& grid() const { return grid_; }
    bool at(int i, int j) const { return occupied_[grid_.index(i, j)] != 0; }
    bool at(int k) const { return occupied_[k] != 0; }
    void set(int i, int j, bool v = true) { occupied_[grid_.index(i, j)] = v ? 1 : 0; }
    void set(int k, bool v = true) { occupied_[k] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<int> nodes() const;
    const std::vector<std::uint8_t>& data() const { return occupied_; }

    friend bool operator==(const PixelMask&, const PixelMask&) = default;

private:
    Grid grid_;
    std::vector<std::uint8_t> occupied_;
};

// Per-node real values on a grid (distance, weight, density, potential).
class ScalarField {
public:
    explicit ScalarField(Grid grid, double fill = 0.0);
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double at(int i, int j) const { return values_[grid_.index(i, j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double max() const;
    double min() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

void require_same_grid(const Grid& a, const Grid& b);

} // namespace modlab
