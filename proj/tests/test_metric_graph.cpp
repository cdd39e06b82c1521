#include <doctest.h>

#include <cmath>

#include "modlab/errors.hpp"
#include "modlab/metric_graph.hpp"
#include "modlab/set_library.hpp"
#include "modlab/weight_engine.hpp"
#include "oracles.hpp"

using namespace modlab;

namespace {

ScalarField lemma_weight(const PixelMask& mask) {
    return eval_weight(distance_transform(mask), {WeightKind::lemma35, 2.0});
}

std::vector<int> occupied(const PixelMask& m) { return m.nodes(); }

} // namespace

TEST_CASE("unit weight edge lengths") {
    const Grid g = Grid::square({0, 0}, 1.0, 9);
    const auto mg = MetricGraph::build(ScalarField(g, 1.0));
    const int u = g.index(4, 4);
    int axis = 0, diag = 0;
    mg.for_each_edge(u, [&](int v, Ticks t) {
        const bool d = g.col(v) != 4 && g.row(v) != 4;
        CHECK(from_ticks(t) == doctest::Approx(d ? g.h() * std::sqrt(2.0) : g.h()).epsilon(1e-15));
        (d ? diag : axis)++;
    });
    CHECK(axis == 4);
    CHECK(diag == 4);
}

TEST_CASE("zero weight collapses every edge") {
    const Grid g = Grid::square({0, 0}, 1.0, 9);
    const auto mg = MetricGraph::build(ScalarField(g, 0.0));
    for (std::size_t u = 0; u < g.size(); ++u)
        mg.for_each_edge(static_cast<int>(u), [&](int, Ticks t) { CHECK(t == 0); });
}

TEST_CASE("ramp weight edges follow the trapezoid rule") {
    const int n = 11;
    const Grid g = Grid::square({0, 0}, 2.0, n);
    ScalarField omega(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            omega[g.index(i, j)] = static_cast<double>(i) / (n - 1);
    const auto mg = MetricGraph::build(omega);
    for (int i = 0; i + 1 < n; ++i) {
        const double axis = g.h() * (2.0 * i + 1.0) / (2.0 * (n - 1));
        CHECK(mg.edge_weight(g.index(i, 3), g.index(i + 1, 3), 1.0) == doctest::Approx(axis).epsilon(1e-14));
        CHECK(mg.edge_weight(g.index(i, 3), g.index(i + 1, 4), std::sqrt(2.0)) ==
              doctest::Approx(std::sqrt(2.0) * axis).epsilon(1e-14));
        CHECK(mg.edge_weight(g.index(i, 3), g.index(i, 4), 1.0) ==
              doctest::Approx(g.h() * i / (n - 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("unit weight distances") {
    const Grid g = Grid::square({0, 0}, 1.0, 65);
    const auto mg = MetricGraph::build(ScalarField(g, 1.0));
    CHECK(graph_distance(mg, 0, 1) == doctest::Approx(g.h()).epsilon(1e-15));
    CHECK(graph_distance(mg, 0, g.index(64, 64)) == doctest::Approx(64 * g.h() * std::sqrt(2.0)).epsilon(1e-15));

    const Grid small = Grid::square({0, 0}, 1.0, 9);
    const auto fw = oracle::all_pairs(ScalarField(small, 1.0));
    const auto far = static_cast<std::size_t>(small.index(8, 8));
    CHECK(fw[far] == doctest::Approx(8 * small.h() * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(graph_distance(MetricGraph::build(ScalarField(small, 1.0)), 0, static_cast<int>(far)) ==
          doctest::Approx(fw[far]).epsilon(1e-14));
}

TEST_CASE("graph distances match Floyd-Warshall on weighted grids") {
    auto rng = oracle::rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid g = Grid::square({0, 0}, 1.0, 13);
    ScalarField omega(g);
    for (auto& v : omega.values())
        v = u(rng) < 0.2 ? 0.0 : u(rng);
    const auto fw = oracle::all_pairs(omega);
    const auto mg = MetricGraph::build(omega);
    for (int s : {0, 17, 84, 168}) {
        const int src[] = {s};
        const auto d = shortest_distances(mg, src);
        for (std::size_t t = 0; t < g.size(); ++t)
            REQUIRE(d.value(static_cast<int>(t)) == doctest::Approx(fw[s * g.size() + t]).epsilon(1e-12));
    }
}

TEST_CASE("lemma35 weight contracts distances between cantor components") {
    const Grid g = Grid::square({-0.25, -0.75}, 1.5, 97);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 4, g);
    const auto mg = MetricGraph::build(lemma_weight(mask));
    const auto nodes = occupied(mask);
    for (std::size_t a = 0; a < nodes.size(); a += 7)
        for (std::size_t b = a + 3; b < nodes.size(); b += 11) {
            const Point p = g.node(nodes[a]), q = g.node(nodes[b]);
            CHECK(graph_distance(mg, nodes[a], nodes[b]) <= std::hypot(p.x - q.x, p.y - q.y) + 1e-15);
        }
}

TEST_CASE("empty source set") {
    const Grid g = Grid::square({0, 0}, 1.0, 9);
    const auto mg = MetricGraph::build(ScalarField(g, 1.0));
    CHECK_THROWS_AS(shortest_distances(mg, std::span<const int>{}), DomainError);
    CHECK_THROWS_AS(MetricGraph::build(ScalarField(g, -1.0)), DomainError);
}

TEST_CASE("symmetry and triangle inequality are exact") {
    const Grid g = Grid::square({-0.25, -0.75}, 1.5, 65);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 5, g);
    const auto mg = MetricGraph::build(lemma_weight(mask));
    auto rng = oracle::rng(5);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(g.size()) - 1);
    std::vector<int> pool;
    for (int k = 0; k < 40; ++k)
        pool.push_back(pick(rng));
    for (int k = 0; k < 10; ++k)
        pool.push_back(mask.nodes()[k * 7 % mask.count()]);
    std::vector<DistanceField> fields;
    for (int s : pool) {
        const int src[] = {s};
        fields.push_back(shortest_distances(mg, src));
    }
    for (std::size_t a = 0; a < pool.size(); ++a)
        for (std::size_t b = 0; b < pool.size(); ++b)
            REQUIRE(fields[a].ticks[pool[b]] == fields[b].ticks[pool[a]]);
    std::uniform_int_distribution<std::size_t> which(0, pool.size() - 1);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t a = which(rng), b = which(rng);
        const int c = pick(rng);
        const Ticks ac = fields[a].ticks[c], ab = fields[a].ticks[pool[b]], bc = fields[b].ticks[c];
        REQUIRE(ac <= ab + bc);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("smaller weights give smaller distances") {
    const Grid g = Grid::square({-0.25, -0.75}, 1.5, 65);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 5, g);
    const auto delta = distance_transform(mask);
    const auto p3 = eval_weight(delta, {WeightKind::power, 3.0});
    const auto p2 = eval_weight(delta, {WeightKind::power, 2.0});
    const auto ind = eval_weight(delta, {WeightKind::indicator_complement, 2.0});
    ScalarField half = p2;
    for (auto& v : half.values())
        v *= 0.5;
    const std::vector<std::pair<const ScalarField*, const ScalarField*>> pairs = {{&p3, &p2}, {&p2, &ind}, {&half, &p2}};
    auto rng = oracle::rng(6);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(g.size()) - 1);
    for (const auto& [lo, hi] : pairs) {
        for (std::size_t k = 0; k < g.size(); ++k)
            REQUIRE((*lo)[k] <= (*hi)[k]);
        const auto glo = MetricGraph::build(*lo), ghi = MetricGraph::build(*hi);
        for (int s = 0; s < 5; ++s) {
            const int src[] = {pick(rng)};
            const auto dlo = shortest_distances(glo, src), dhi = shortest_distances(ghi, src);
            for (std::size_t k = 0; k < g.size(); ++k)
                REQUIRE(dlo.ticks[k] <= dhi.ticks[k]);
        }
    }
}

TEST_CASE("lemma35 distance bound") {
    const Grid g = Grid::square({-0.5, -1.0}, 2.0, 257);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 8, g);
    const auto mg = MetricGraph::build(lemma_weight(mask));
    const int y = g.index(64, 128);
    REQUIRE(mask.at(y));
    for (double p : {2.0, 3.0})
        for (double d : {0.1, 0.3}) {
            const double slack = lemma35_distance_bound(mg, y, d, p);
            CHECK(slack <= lemma35_tolerance(g.h(), d, p));
        }
    CHECK(std::pow(0.3, 3.0) / 3.0 == doctest::Approx(0.009));
    CHECK_THROWS_AS(lemma35_distance_bound(mg, y, 0.4, 3.0), PreconditionError);

    double prev = std::numeric_limits<double>::infinity();
    for (double d : {0.3, 0.1, 0.03, 0.01}) {
        const int src[] = {y};
        const auto dist = shortest_distances(mg, src);
        double worst = 0.0;
        for (int x : ball_nodes(g, y, d))
            worst = std::max(worst, dist.value(x));
        CHECK(worst <= prev);
        prev = worst;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("indicator weight exceeds the power bound") {
    const Grid g = Grid::square({-0.5, -1.0}, 2.0, 257);
    const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 8, g);
    const auto mg = MetricGraph::build(eval_weight(distance_transform(mask), {WeightKind::indicator_complement, 2.0}));
    const int y = g.index(64, 128);
    for (double d : {0.05, 0.1})
        CHECK(lemma35_distance_bound(mg, y, d, 2.0) > lemma35_tolerance(g.h(), d, 2.0));
}

TEST_CASE("weighted diameter") {
    const Grid g = Grid::square({0, 0}, 1.0, 9);
    const auto unit = MetricGraph::build(ScalarField(g, 1.0));
    const int one[] = {40};
    CHECK(weighted_diameter(unit, one).value == 0.0);
    const int two[] = {0, 13};
    CHECK(weighted_diameter(unit, two).value == doctest::Approx(g.h() * (3 + std::sqrt(2.0))).epsilon(1e-14));
    CHECK_THROWS_AS(weighted_diameter(unit, std::span<const int>{}), DomainError);

    for (int n : {17, 25}) {
        const Grid cg = Grid::square({0, -0.5}, 1.0, n);
        const auto mask = rasterize(CompactSetSpec::cantor_line(1.0 / 3.0), 3, cg);
        const auto omega = lemma_weight(mask);
        const auto fw = oracle::all_pairs(omega);
        const auto nodes = occupied(mask);
        double want = 0.0;
        for (int a : nodes)
            for (int b : nodes)
                want = std::max(want, fw[a * cg.size() + b]);
        const auto got = weighted_diameter(MetricGraph::build(omega), nodes);
        CHECK(got.exact);
        CHECK(got.value == doctest::Approx(want).epsilon(1e-12));
    }
}
