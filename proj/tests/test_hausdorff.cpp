#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modlab/errors.hpp"
#include "modlab/hausdorff.hpp"
#include "modlab/set_library.hpp"
#include "modlab/weight_engine.hpp"
#include "oracles.hpp"

using namespace modlab;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

// Optimal cover over dyadic boxes of node indices: each box either pays for the cell union
// of its nodes or splits into four.
double dyadic_oracle(const std::vector<std::pair<int, int>>& pts, int x0, int y0, int size, double s, double h) {
    if (pts.empty())
        return 0.0;
    long long best = 0;
    for (const auto& [ax, ay] : pts)
        for (const auto& [bx, by] : pts) {
            const long long dx = std::abs(ax - bx) + 1, dy = std::abs(ay - by) + 1;
            best = std::max(best, dx * dx + dy * dy);
        }
    const double whole = std::pow(std::sqrt(static_cast<double>(best)) * h, s);
    if (size == 1)
        return whole;
    const int half = size / 2;
    double split = 0.0;
    for (int qx = 0; qx < 2; ++qx)
        for (int qy = 0; qy < 2; ++qy) {
            std::vector<std::pair<int, int>> sub;
            for (const auto& p : pts)
                if ((p.first >= x0 + half) == (qx == 1) && (p.second >= y0 + half) == (qy == 1))
                    sub.push_back(p);
            split += dyadic_oracle(sub, x0 + qx * half, y0 + qy * half, half, s, h);
        }
    return std::min(whole, split);
}

Grid triadic_strip(int depth) {
    const double h = std::pow(3.0, -depth);
    return Grid({0.0, -h}, h, static_cast<int>(std::lround(std::pow(3.0, depth))) + 1, 3);
}

} // namespace

TEST_CASE("normalizer") {
    CHECK(hausdorff_normalizer(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hausdorff_normalizer(2.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
    CHECK(hausdorff_normalizer(0.7, Normalizer::unit) == 1.0);
}

TEST_CASE("empty set has zero content") {
    const Grid g = Grid::square({0, 0}, 1.0, 17);
    for (double s : {0.0, 0.5, 1.0, 2.0})
        CHECK(content_upper(PixelMask(g), {s}) == 0.0);
}

TEST_CASE("dyadic cover matches brute-force recursion") {
    auto rng = oracle::rng(7);
    std::bernoulli_distribution coin(0.15);
    for (int trial = 0; trial < 6; ++trial) {
        const Grid g = Grid::square({0, 0}, 1.0, 13 + trial);
        PixelMask mask(g);
        for (std::size_t k = 0; k < g.size(); ++k)
            mask.set(static_cast<int>(k), coin(rng));
        std::vector<std::pair<int, int>> pts;
        for (int k : mask.nodes())
            pts.emplace_back(g.col(k), g.row(k));
        int size = 1;
        while (size < g.nx())
            size *= 2;
        for (double s : {0.5, 1.0, 1.5}) {
            const double want = hausdorff_normalizer(s) * dyadic_oracle(pts, 0, 0, size, s, g.h());
            CHECK(content_upper(mask, {s}) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    const Grid strip = triadic_strip(3);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 3, strip);
    std::vector<std::pair<int, int>> pts;
    for (int k : mask.nodes())
        pts.emplace_back(strip.col(k), strip.row(k));
    const double want = hausdorff_normalizer(kCantorDim) * dyadic_oracle(pts, 0, 0, 32, kCantorDim, strip.h());
    CHECK(content_upper(mask, {kCantorDim}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("content is monotone under inclusion") {
    auto rng = oracle::rng(8);
    std::bernoulli_distribution coin(0.2);
    const Grid g = Grid::square({0, 0}, 1.0, 33);
    for (int trial = 0; trial < 10; ++trial) {
        PixelMask small(g), big(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const bool a = coin(rng);
            small.set(static_cast<int>(k), a);
            big.set(static_cast<int>(k), a || coin(rng));
        }
        for (double s : {0.6, 1.0})
            CHECK(content_upper(small, {s}) <= content_upper(big, {s}) + 1e-15);
    }
}

TEST_CASE("connected-set identity on a segment") {
    const Grid g = Grid::square({-0.125, -0.5}, 1.25, 161);
    const auto mask = rasterize(CompactSetSpec::segment({0, 0}, {1, 0}), 0, g);
    const auto [content, diam] = connected_content_identity_check(mask);
    CHECK(std::abs(diam - 1.0) <= 4 * g.h());
    CHECK(std::abs(content - diam) <= 4 * g.h());
    CHECK(std::abs(content - 1.0) <= 4 * g.h());
}

TEST_CASE("connected-set identity on a circle") {
    const double r = 0.4;
    const Grid g = Grid::square({-0.5, -0.5}, 1.0, 257);
    const auto mask = rasterize(CompactSetSpec::circle({0, 0}, r), 0, g);
    const auto [content, diam] = connected_content_identity_check(mask);
    CHECK(std::abs(diam - 2 * r) <= 4 * g.h());
    CHECK(std::abs(content - 2 * r) <= 4 * g.h());
}

TEST_CASE("connected-set identity on a single node and a broken set") {
    const Grid g = Grid::square({0, 0}, 1.0, 9);
    PixelMask one(g);
    one.set(4, 4);
    const auto [content, diam] = connected_content_identity_check(one);
    CHECK(diam == 0.0);
    CHECK(content == doctest::Approx(std::sqrt(2.0) * g.h()));
    one.set(7, 7);
    CHECK_THROWS_AS(connected_content_identity_check(one), PreconditionError);
}

TEST_CASE("cantor content is stable across depths") {
    std::vector<double> values;
    for (int depth : {6, 7, 8}) {
        const Grid g = triadic_strip(8);
        const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), depth, g);
        values.push_back(content_upper(mask, {kCantorDim}));
    }
    for (double v : values) {
        CHECK(v >= 0.3);
        CHECK(v <= 1.5);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    CHECK(*hi / *lo < 1.25);
}

TEST_CASE("scale cap") {
    const Grid g = Grid::square({-0.125, -0.5}, 1.25, 65);
    const auto mask = rasterize(CompactSetSpec::segment({0, 0}, {1, 0}), 0, g);
    HausdorffQuery q{1.0, 0.1};
    const double capped = content_upper(mask, q);
    CHECK(capped >= content_upper(mask, {1.0}) - 1e-12);
    CHECK_THROWS_AS(content_upper(mask, {1.0, g.h()}), DomainError);
    CHECK_THROWS_AS(content_upper(mask, {-1.0}), ParameterError);
}

TEST_CASE("weighted content of a lemma35 cantor set falls below the euclidean one") {
    const Grid g = Grid::square({-0.25, -0.75}, 1.5, 129);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 5, g);
    const auto omega = eval_weight(distance_transform(mask), {WeightKind::lemma35, 2.0});
    const auto mg = MetricGraph::build(omega);
    HausdorffQuery q{kCantorDim};
    const double euclid = content_upper(mask, q);
    q.weighted = &mg;
    CHECK(content_upper(mask, q) < euclid);
}

TEST_CASE("box counting") {
    const Grid g = Grid::square({0, 0}, 1.0, 257);
    PixelMask full(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        full.set(static_cast<int>(k));
    const auto scales = dyadic_scales(0.25, 5);
    CHECK(box_dimension(full, scales).slope == doctest::Approx(2.0).epsilon(0.05));

    PixelMask point(g);
    point.set(100, 37);
    CHECK(std::abs(box_dimension(point, scales).slope) < 1e-12);

    CHECK_THROWS_AS(box_dimension(point, dyadic_scales(0.25, 2)), PreconditionError);
    const double flat[] = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(box_dimension(point, flat), PreconditionError);
}

TEST_CASE("middle-thirds cantor box dimension from triadic counts") {
    const Grid g = triadic_strip(8);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 8, g);
    std::vector<double> scales;
    for (int k = 1; k <= 6; ++k)
        scales.push_back(std::pow(3.0, -k));
    const auto dim = box_dimension(mask, scales);
    for (const auto& c : dim.counts) {
        const double self_similar = std::pow(2.0, std::round(-std::log(c.scale) / std::log(3.0)));
        CHECK(static_cast<double>(c.count) >= self_similar);
        CHECK(static_cast<double>(c.count) <= 2 * self_similar);
    }
    CHECK(std::abs(dim.slope - kCantorDim) <= 0.05);
}

TEST_CASE("weighted ball counting uses graph balls") {
    const Grid g = Grid::square({0, 0}, 1.0, 33);
    PixelMask row(g);
    for (int i = 0; i < g.nx(); ++i)
        row.set(i, 16);
    const auto unit = MetricGraph::build(ScalarField(g, 1.0));
    CHECK(ball_count(row, unit, 4 * g.h()) == 11);
    const auto zero = MetricGraph::build(ScalarField(g, 0.0));
    CHECK(ball_count(row, zero, g.h()) == 1);
}
