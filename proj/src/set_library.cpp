#include "modlab/set_library.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "modlab/errors.hpp"

namespace modlab {

namespace {

struct KindName {
    SetKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {SetKind::cantor_line, "cantor_line"},   {SetKind::cantor_product, "cantor_product"},
    {SetKind::fat_cantor, "fat_cantor"},     {SetKind::segment, "segment"},
    {SetKind::polyline_arc, "polyline_arc"}, {SetKind::circle, "circle"},
    {SetKind::raw_mask, "raw_mask"},
};

// Node index range [lo, hi] whose closed cells meet the closed interval [a, b] along one axis.
// Returns lo > hi when empty.
std::pair<int, int> cell_range(double a, double b, double origin, double h, int n) {
    auto right_edge_reaches = [&](int i) { return origin + (i + 0.5) * h >= a; };
    auto left_edge_reaches = [&](int i) { return origin + (i - 0.5) * h <= b; };

    int lo = static_cast<int>(std::ceil((a - origin) / h - 0.5));
    lo = std::clamp(lo, 0, n - 1);
    while (lo > 0 && right_edge_reaches(lo - 1))
        --lo;
    while (lo < n && !right_edge_reaches(lo))
        ++lo;

    int hi = static_cast<int>(std::floor((b - origin) / h + 0.5));
    hi = std::clamp(hi, 0, n - 1);
    while (hi < n - 1 && left_edge_reaches(hi + 1))
        ++hi;
    while (hi >= 0 && !left_edge_reaches(hi))
        --hi;
    return {lo, hi};
}

void raster_box(const Box& box, PixelMask& mask) {
    const Grid& g = mask.grid();
    auto [i0, i1] = cell_range(box.x0, box.x1, g.origin().x, g.h(), g.nx());
    auto [j0, j1] = cell_range(box.y0, box.y1, g.origin().y, g.h(), g.ny());
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            mask.set(i, j);
}

void raster_segment(const Segment& s, PixelMask& mask) {
    Point p = s.a, q = s.b;
    if (p.x > q.x)
        std::swap(p, q);
    if (p.x == q.x) {
        raster_box({p.x, std::min(p.y, q.y), p.x, std::max(p.y, q.y)}, mask);
        return;
    }
    const Grid& g = mask.grid();
    const double h = g.h();
    auto [i0, i1] = cell_range(p.x, q.x, g.origin().x, h, g.nx());
    const double slope = (q.y - p.y) / (q.x - p.x);
    for (int i = i0; i <= i1; ++i) {
        const double cx = g.origin().x + i * h;
        const double xa = std::max(p.x, cx - 0.5 * h);
        const double xb = std::min(q.x, cx + 0.5 * h);
        if (xa > xb)
            continue;
        const double ya = xa == p.x ? p.y : p.y + slope * (xa - p.x);
        const double yb = xb == q.x ? q.y : p.y + slope * (xb - p.x);
        auto [j0, j1] = cell_range(std::min(ya, yb), std::max(ya, yb), g.origin().y, h, g.ny());
        for (int j = j0; j <= j1; ++j)
            mask.set(i, j);
    }
}

void raster_circle(const Circle& c, PixelMask& mask) {
    const Grid& g = mask.grid();
    const double h = g.h();
    auto [i0, i1] = cell_range(c.center.x - c.radius, c.center.x + c.radius, g.origin().x, h, g.nx());
    auto [j0, j1] = cell_range(c.center.y - c.radius, c.center.y + c.radius, g.origin().y, h, g.ny());
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const Point n = g.node(i, j);
            const double lx = n.x - 0.5 * h, hx = n.x + 0.5 * h;
            const double ly = n.y - 0.5 * h, hy = n.y + 0.5 * h;
            const double nearx = std::clamp(c.center.x, lx, hx) - c.center.x;
            const double neary = std::clamp(c.center.y, ly, hy) - c.center.y;
            const double farx = std::max(std::abs(lx - c.center.x), std::abs(hx - c.center.x));
            const double fary = std::max(std::abs(ly - c.center.y), std::abs(hy - c.center.y));
            const double r2 = c.radius * c.radius;
            if (nearx * nearx + neary * neary <= r2 && farx * farx + fary * fary >= r2)
                mask.set(i, j);
        }
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(SetKind kind) {
    for (const auto& k : kKindNames)
        if (k.kind == kind)
            return k.name;
    return "unknown";
}

SetKind set_kind_from_string(const std::string& name) {
    for (const auto& k : kKindNames)
        if (name == k.name)
            return k.kind;
    throw ParameterError("set.kind", "unknown set kind '" + name + "'");
}

CompactSetSpec CompactSetSpec::cantor_line(double ratio, Point anchor, double length) {
    CompactSetSpec s;
    s.kind = SetKind::cantor_line;
    s.ratio = ratio;
    s.anchor = anchor;
    s.length = length;
    s.validate();
    return s;
}

CompactSetSpec CompactSetSpec::cantor_product(double ratio, Point anchor, double length) {
    CompactSetSpec s = cantor_line(ratio, anchor, length);
    s.kind = SetKind::cantor_product;
    return s;
}

CompactSetSpec CompactSetSpec::fat_cantor(Point anchor, double length, std::vector<double> gaps) {
    CompactSetSpec s;
    s.kind = SetKind::fat_cantor;
    s.anchor = anchor;
    s.length = length;
    s.gaps = std::move(gaps);
    s.validate();
    return s;
}

CompactSetSpec CompactSetSpec::segment(Point a, Point b) {
    CompactSetSpec s;
    s.kind = SetKind::segment;
    s.a = a;
    s.b = b;
    s.validate();
    return s;
}

CompactSetSpec CompactSetSpec::polyline(std::vector<Point> vertices) {
    CompactSetSpec s;
    s.kind = SetKind::polyline_arc;
    s.vertices = std::move(vertices);
    s.validate();
    return s;
}

CompactSetSpec CompactSetSpec::circle(Point center, double radius) {
    CompactSetSpec s;
    s.kind = SetKind::circle;
    s.center = center;
    s.radius = radius;
    s.validate();
    return s;
}

CompactSetSpec CompactSetSpec::raw(PixelMask mask) {
    CompactSetSpec s;
    s.kind = SetKind::raw_mask;
    s.mask = std::make_shared<const PixelMask>(std::move(mask));
    return s;
}

double CompactSetSpec::fat_gap(int stage) const {
    if (gaps.empty())
        return length * std::pow(4.0, -stage - 1);
    if (stage >= static_cast<int>(gaps.size()))
        throw ParameterError("set.gaps", "gap sequence shorter than requested depth " + std::to_string(stage + 1));
    return length * gaps[static_cast<std::size_t>(stage)];
}

void CompactSetSpec::validate() const {
    switch (kind) {
    case SetKind::cantor_line:
    case SetKind::cantor_product:
        if (!(ratio > 0.0 && ratio < 1.0))
            throw ParameterError("set.ratio", "removal ratio must lie strictly in (0,1)");
        [[fallthrough]];
    case SetKind::fat_cantor:
        if (!(length > 0.0) || !std::isfinite(length))
            throw ParameterError("set.length", "length must be positive");
        if (kind == SetKind::fat_cantor && !gaps.empty()) {
            double removed = 0.0;
            double piece = 1.0;
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                if (!(gaps[k] > 0.0) || !(gaps[k] < piece))
                    throw ParameterError("set.gaps", "gap " + std::to_string(k) + " does not fit its interval");
                removed += std::ldexp(gaps[k], static_cast<int>(k));
                piece = 0.5 * (piece - gaps[k]);
            }
            if (!(removed < 1.0))
                throw ParameterError("set.gaps", "total removed length must be < 1");
        }
        break;
    case SetKind::segment:
        break;
    case SetKind::polyline_arc:
        if (vertices.size() < 2)
            throw ParameterError("set.vertices", "polyline needs at least two vertices");
        break;
    case SetKind::circle:
        if (!(radius > 0.0))
            throw ParameterError("set.radius", "radius must be positive");
        break;
    case SetKind::raw_mask:
        if (!mask)
            throw ParameterError("set.mask", "raw_mask without a mask");
        break;
    }
}

Rect CompactSetSpec::bounding_box() const {
    switch (kind) {
    case SetKind::cantor_line:
    case SetKind::fat_cantor:
        return {anchor.x, anchor.y, anchor.x + length, anchor.y};
    case SetKind::cantor_product:
        return {anchor.x, anchor.y, anchor.x + length, anchor.y + length};
    case SetKind::segment:
        return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
    case SetKind::polyline_arc: {
        Rect r{vertices[0].x, vertices[0].y, vertices[0].x, vertices[0].y};
        for (const auto& v : vertices) {
            r.x0 = std::min(r.x0, v.x);
            r.y0 = std::min(r.y0, v.y);
            r.x1 = std::max(r.x1, v.x);
            r.y1 = std::max(r.y1, v.y);
        }
        return r;
    }
    case SetKind::circle:
        return {center.x - radius, center.y - radius, center.x + radius, center.y + radius};
    case SetKind::raw_mask: {
        Rect r{1.0, 1.0, 0.0, 0.0}; // empty
        bool first = true;
        const Grid& g = mask->grid();
        for (int k : mask->nodes()) {
            const Point p = g.node(k);
            if (first) {
                r = {p.x, p.y, p.x, p.y};
                first = false;
            }
            r.x0 = std::min(r.x0, p.x);
            r.y0 = std::min(r.y0, p.y);
            r.x1 = std::max(r.x1, p.x);
            r.y1 = std::max(r.y1, p.y);
        }
        return r;
    }
    }
    return {};
}

std::vector<std::pair<double, double>> cantor_intervals(const CompactSetSpec& spec, int depth) {
    if (depth < 0)
        throw ParameterError("depth", "depth must be >= 0");
    spec.validate();
    if (!spec.is_cantor())
        throw ParameterError("set.kind", "not a Cantor-type set");
    std::vector<std::pair<double, double>> cur{{spec.anchor.x, spec.anchor.x + spec.length}};
    // Right pieces are measured back from hi so that the generation is mirror-symmetric.
    for (int k = 0; k < depth; ++k) {
        std::vector<std::pair<double, double>> next;
        next.reserve(cur.size() * 2);
        const double gap_abs = spec.kind == SetKind::fat_cantor ? spec.fat_gap(k) : 0.0;
        for (auto [lo, hi] : cur) {
            const double len = hi - lo;
            const double keep = spec.kind == SetKind::fat_cantor ? 0.5 * (len - gap_abs) : 0.5 * (1.0 - spec.ratio) * len;
            if (!(keep > 0.0))
                throw ParameterError("set.gaps", "gap at stage " + std::to_string(k) + " exceeds its interval");
            next.emplace_back(lo, lo + keep);
            next.emplace_back(hi - keep, hi);
        }
        cur = std::move(next);
    }
    return cur;
}

Generation generate(const CompactSetSpec& spec, int depth) {
    if (depth < 0)
        throw ParameterError("depth", "depth must be >= 0");
    spec.validate();
    Generation gen;
    switch (spec.kind) {
    case SetKind::cantor_line:
    case SetKind::fat_cantor:
        for (auto [lo, hi] : cantor_intervals(spec, depth))
            gen.boxes.push_back({lo, spec.anchor.y, hi, spec.anchor.y});
        break;
    case SetKind::cantor_product: {
        const auto line = cantor_intervals(spec, depth);
        const double dy = spec.anchor.y - spec.anchor.x;
        gen.boxes.reserve(line.size() * line.size());
        for (auto [ylo, yhi] : line)
            for (auto [xlo, xhi] : line)
                gen.boxes.push_back({xlo, ylo + dy, xhi, yhi + dy});
        break;
    }
    case SetKind::segment:
        gen.segments.push_back({spec.a, spec.b});
        break;
    case SetKind::polyline_arc:
        for (std::size_t k = 0; k + 1 < spec.vertices.size(); ++k)
            gen.segments.push_back({spec.vertices[k], spec.vertices[k + 1]});
        break;
    case SetKind::circle:
        gen.circles.push_back({spec.center, spec.radius});
        break;
    case SetKind::raw_mask: {
        const Grid& g = spec.mask->grid();
        for (int k : spec.mask->nodes()) {
            const Point p = g.node(k);
            gen.boxes.push_back({p.x, p.y, p.x, p.y});
        }
        break;
    }
    }
    return gen;
}

PixelMask rasterize(const Generation& gen, const Grid& grid) {
    PixelMask mask(grid);
    for (const auto& b : gen.boxes)
        raster_box(b, mask);
    for (const auto& s : gen.segments)
        raster_segment(s, mask);
    for (const auto& c : gen.circles)
        raster_circle(c, mask);
    return mask;
}

PixelMask rasterize(const CompactSetSpec& spec, int depth, const Grid& grid, RasterMode mode) {
    spec.validate();
    if (mode == RasterMode::strict && !grid.covers(spec.bounding_box()))
        throw GeometryError("grid does not cover the bounding box of the " + to_string(spec.kind) + " set");
    return rasterize(generate(spec, depth), grid);
}

std::string mask_to_string(const PixelMask& mask) {
    const Grid& g = mask.grid();
    if (g.nx() != g.ny())
        throw GeometryError("mask files hold square grids only");
    const int n = g.nx();
    const Rect e = g.extent();
    std::string out = "MODLAB-MASK v1 n=" + std::to_string(n) + " origin=" + fmt_double(g.origin().x) + "," +
                      fmt_double(g.origin().y) + " extent=" + fmt_double(e.width()) + "," + fmt_double(e.height()) +
                      " occupied=" + std::to_string(mask.count()) + "\n";
    out.reserve(out.size() + static_cast<std::size_t>(n) * (n + 1));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i)
            out.push_back(mask.at(i, j) ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

PixelMask mask_from_string(const std::string& text) {
    const std::size_t eol = text.find('\n');
    if (eol == std::string::npos)
        throw FormatError("mask header is not newline-terminated", text.size());
    const std::string header = text.substr(0, eol);
    int n = 0;
    double ox = 0, oy = 0, ex = 0, ey = 0;
    long long occupied = 0;
    int consumed = 0;
    const int fields = std::sscanf(header.c_str(), "MODLAB-MASK v1 n=%d origin=%lf,%lf extent=%lf,%lf occupied=%lld%n", &n,
                                   &ox, &oy, &ex, &ey, &occupied, &consumed);
    if (fields != 6 || consumed != static_cast<int>(header.size()))
        throw FormatError("malformed mask header", 0);
    if (n < 3)
        throw FormatError("mask size n must be >= 3", 0);
    if (!(ex > 0.0) || std::abs(ex - ey) > 1e-12 * ex)
        throw FormatError("mask extent must be positive and square", 0);

    Grid grid = Grid::square({ox, oy}, ex, n);
    PixelMask mask(grid);
    std::size_t pos = eol + 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i, ++pos) {
            if (pos >= text.size())
                throw FormatError("truncated mask body", pos);
            const char c = text[pos];
            if (c == '1')
                mask.set(i, j);
            else if (c != '0')
                throw FormatError(std::string("unexpected character '") + c + "' in mask body", pos);
        }
        if (pos >= text.size())
            throw FormatError("truncated mask body", pos);
        if (text[pos] != '\n')
            throw FormatError("mask row too long", pos);
        ++pos;
    }
    if (pos != text.size())
        throw FormatError("trailing data after mask body", pos);
    if (static_cast<long long>(mask.count()) != occupied)
        throw FormatError("occupied count " + std::to_string(mask.count()) + " does not match header " +
                              std::to_string(occupied),
                          0);
    return mask;
}

void save_mask(const PixelMask& mask, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << mask_to_string(mask);
}

PixelMask load_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return mask_from_string(ss.str());
}

} // namespace modlab
