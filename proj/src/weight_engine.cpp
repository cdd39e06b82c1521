#include "modlab/weight_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "modlab/errors.hpp"

namespace modlab {

namespace {

constexpr double kFar = 1e20;

// Felzenszwalb-Huttenlocher lower envelope of parabolas: out[q] = min_k (q-k)^2 + f[k].
void envelope_1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q)
            ++k;
        const double d = q - v[k];
        out[q] = d * d + f[v[k]];
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(WeightKind kind) {
    switch (kind) {
    case WeightKind::lemma35: return "lemma35";
    case WeightKind::power: return "power";
    case WeightKind::indicator_complement: return "indicator_complement";
    }
    return "unknown";
}

WeightKind weight_kind_from_string(const std::string& name) {
    if (name == "lemma35")
        return WeightKind::lemma35;
    if (name == "power")
        return WeightKind::power;
    if (name == "indicator_complement" || name == "indicator")
        return WeightKind::indicator_complement;
    throw ParameterError("weight.kind", "unknown weight kind '" + name + "'");
}

void WeightSpec::validate() const {
    if (kind == WeightKind::power && !(p > 0.0 && std::isfinite(p)))
        throw ParameterError("weight.p", "exponent must be positive");
}

ScalarField distance_transform(const PixelMask& mask) {
    const Grid& g = mask.grid();
    if (mask.empty())
        throw DomainError("distance to empty set undefined");
    const int nx = g.nx(), ny = g.ny();
    std::vector<double> sq(g.size());

    // Column pass: squared vertical offset to the nearest occupied node in the same column.
    {
        std::vector<double> f(ny), out(ny), z(ny + 1);
        std::vector<int> v(ny);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j)
                f[j] = mask.at(i, j) ? 0.0 : kFar;
            envelope_1d(f, out, v, z);
            for (int j = 0; j < ny; ++j)
                sq[g.index(i, j)] = out[j];
        }
    }
    // Row pass.
    {
        std::vector<double> f(nx), out(nx), z(nx + 1);
        std::vector<int> v(nx);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i)
                f[i] = sq[g.index(i, j)];
            envelope_1d(f, out, v, z);
            for (int i = 0; i < nx; ++i)
                sq[g.index(i, j)] = out[i];
        }
    }
    ScalarField delta(g);
    for (std::size_t k = 0; k < sq.size(); ++k)
        delta[k] = std::sqrt(sq[k]) * g.h();
    return delta;
}

double weight_value(double delta, const WeightSpec& spec) {
    if (!(delta > 0.0))
        return 0.0;
    switch (spec.kind) {
    case WeightKind::lemma35: {
        if (delta >= 1.0)
            return 1.0;
        const double v = std::exp(std::log(delta) / delta);
        return v < kWeightUnderflow ? 0.0 : std::min(v, 1.0);
    }
    case WeightKind::power: {
        const double v = std::pow(delta, spec.p);
        return v < kWeightUnderflow ? 0.0 : std::min(v, 1.0);
    }
    case WeightKind::indicator_complement:
        return 1.0;
    }
    return 0.0;
}

ScalarField eval_weight(const ScalarField& delta, const WeightSpec& spec) {
    spec.validate();
    ScalarField omega(delta.grid());
    for (std::size_t k = 0; k < delta.values().size(); ++k)
        omega[k] = weight_value(delta[k], spec);
    return omega;
}

std::vector<int> ball_nodes(const Grid& grid, int center, double radius) {
    const Point c = grid.node(center);
    const Rect e = grid.extent();
    const double eps = 1e-12 * grid.h();
    if (c.x - radius < e.x0 - eps || c.x + radius > e.x1 + eps || c.y - radius < e.y0 - eps || c.y + radius > e.y1 + eps)
        throw GeometryError("ball of radius " + fmt(radius) + " leaves the grid");
    const int reach = static_cast<int>(std::floor(radius / grid.h())) + 1;
    const int ci = grid.col(center), cj = grid.row(center);
    std::vector<int> out;
    for (int j = cj - reach; j <= cj + reach; ++j) {
        for (int i = ci - reach; i <= ci + reach; ++i) {
            if (!grid.inside(i, j))
                continue;
            const double dx = (i - ci) * grid.h(), dy = (j - cj) * grid.h();
            if (std::sqrt(dx * dx + dy * dy) <= radius)
                out.push_back(grid.index(i, j));
        }
    }
    return out;
}

bool weight_bound_check(const ScalarField& delta, const ScalarField& omega, double p, int center, double radius) {
    require_same_grid(delta.grid(), omega.grid());
    if (!(p > 1.0) || !(radius < 1.0 / p))
        throw PreconditionError("weight bound needs radius < 1/p < 1");
    for (int k : ball_nodes(delta.grid(), center, radius)) {
        const double bound = std::pow(delta[k], p);
        if (omega[k] > bound * (1.0 + 4 * std::numeric_limits<double>::epsilon()))
            return false;
    }
    return true;
}

std::string field_to_pgm(const ScalarField& field) {
    const Grid& g = field.grid();
    double top = 0.0;
    for (double v : field.values()) {
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("PGM export needs finite non-negative values");
        top = std::max(top, v);
    }
    const double scale = top > 0.0 ? top : 1.0;
    std::string out = "P5\n# scale=" + fmt(scale) + " value=pixel*scale/65535\n" + std::to_string(g.nx()) + " " +
                      std::to_string(g.ny()) + "\n65535\n";
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double v = field.at(i, j);
            long px = std::lround(v / scale * 65535.0);
            if (v > 0.0 && px == 0)
                px = 1;
            out.push_back(static_cast<char>((px >> 8) & 0xff));
            out.push_back(static_cast<char>(px & 0xff));
        }
    }
    return out;
}

void save_pgm(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << field_to_pgm(field);
}

std::string field_to_csv(const ScalarField& field) {
    const Grid& g = field.grid();
    std::string out = "# MODLAB-FIELD nx=" + std::to_string(g.nx()) + " ny=" + std::to_string(g.ny()) +
                      " origin=" + fmt(g.origin().x) + "," + fmt(g.origin().y) + " h=" + fmt(g.h()) + "\ni,j,value\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out += std::to_string(i) + "," + std::to_string(j) + "," + fmt(field.at(i, j)) + "\n";
    return out;
}

ScalarField field_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("empty field file", 0);
    int nx = 0, ny = 0, consumed = 0;
    double ox = 0, oy = 0, h = 0;
    if (std::sscanf(line.c_str(), "# MODLAB-FIELD nx=%d ny=%d origin=%lf,%lf h=%lf%n", &nx, &ny, &ox, &oy, &h,
                    &consumed) != 5 ||
        consumed != static_cast<int>(line.size()))
        throw FormatError("malformed field header", 0);
    std::size_t offset = line.size() + 1;
    if (!std::getline(in, line) || line != "i,j,value")
        throw FormatError("missing i,j,value header", offset);
    offset += line.size() + 1;
    ScalarField field(Grid({ox, oy}, h, nx, ny), std::numeric_limits<double>::quiet_NaN());
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        int i = 0, j = 0, used = 0;
        double v = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf%n", &i, &j, &v, &used) != 3 || used != static_cast<int>(line.size()) ||
            !field.grid().inside(i, j))
            throw FormatError("malformed field row", offset);
        field[field.grid().index(i, j)] = v;
        offset += line.size() + 1;
        ++rows;
    }
    if (rows != field.grid().size())
        throw FormatError("field file has " + std::to_string(rows) + " rows, expected " +
                              std::to_string(field.grid().size()),
                          offset);
    return field;
}

void save_csv(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << field_to_csv(field);
}

ScalarField load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return field_from_csv(ss.str());
}

} // namespace modlab
