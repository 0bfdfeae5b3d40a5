#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vawt/fastsum.hpp"

using namespace vawt;

namespace {

struct Errors {
    double rms = 0.0;  // ||fast - exact|| / ||exact||, norm-wise over all targets
    double max = 0.0;  // max over targets of |fast - exact| / rms(|exact|)
};

Errors tree_error(const std::vector<PointVortex>& vs, const VortexTree& tree, double theta,
                  int n_targets, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-10.0, 10.0);
    double num = 0.0, den = 0.0, worst = 0.0;
    for (int k = 0; k < n_targets; ++k) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 e = oracle::biot_savart(vs, x);
        const Vec2 f = tree.eval(x, theta);
        num += norm2(f - e);
        den += norm2(e);
        worst = std::max(worst, norm(f - e));
    }
    return {std::sqrt(num / den), worst / std::sqrt(den / n_targets)};
}

void check_structure(const VortexTree& tree, std::size_t node, std::vector<int>& seen) {
    const auto& n = tree.nodes()[node];
    if (n.is_leaf()) {
        if (n.depth < VortexTree::kMaxDepth) CHECK(static_cast<int>(n.end - n.begin) <= tree.leaf_capacity());
        double sum = 0.0;
        for (auto k = n.begin; k < n.end; ++k) {
            const auto& v = tree.sorted_vortices()[k];
            sum += v.gamma;
            seen[tree.index()[k]] += 1;
            CHECK(std::abs(v.position.x - n.center.x) <= n.half_size * (1 + 1e-12));
            CHECK(std::abs(v.position.y - n.center.y) <= n.half_size * (1 + 1e-12));
        }
        CHECK(n.total_gamma == sum);
        return;
    }
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) {
        const auto& child = tree.nodes()[n.first_child + c];
        sum += child.total_gamma;
        CHECK(child.depth == n.depth + 1);
        check_structure(tree, n.first_child + c, seen);
    }
    CHECK(n.total_gamma == sum);
}

}  // namespace

TEST_CASE("empty and single-vortex trees") {
    const VortexTree empty = VortexTree::build({});
    CHECK(empty.empty());
    CHECK(empty.eval({1.0, 2.0}, 0.5) == Vec2{});

    const std::vector<PointVortex> one{{{0.5, -0.2}, 1.7, 0.1}};
    const VortexTree t = VortexTree::build(one);
    REQUIRE(t.nodes().size() == 1);
    CHECK(t.nodes()[0].is_leaf());
    CHECK(t.nodes()[0].total_gamma == 1.7);
}

TEST_CASE("identical positions stop at the depth cap") {
    std::vector<PointVortex> vs(50, PointVortex{{1.0, 1.0}, 0.1, 0.1});
    const VortexTree t = VortexTree::build(vs, 4);
    int max_depth = 0;
    std::size_t leaf_members = 0;
    for (const auto& n : t.nodes()) {
        max_depth = std::max(max_depth, n.depth);
        if (n.is_leaf()) leaf_members = std::max<std::size_t>(leaf_members, n.end - n.begin);
    }
    CHECK(max_depth <= VortexTree::kMaxDepth);
    CHECK(leaf_members == 50);
    CHECK(t.nodes()[0].total_gamma == doctest::Approx(5.0));
}

TEST_CASE("tree structure on random input") {
    const auto vs = oracle::random_vortices(1000, 17);
    const VortexTree t = VortexTree::build(vs, 8);
    std::vector<int> seen(vs.size(), 0);
    check_structure(t, 0, seen);
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    // Per-node totals match a recomputation over each node's member range: exact at
    // leaves (same order), to rounding for internal nodes (children summed first).
    for (const auto& n : t.nodes()) {
        double sum = 0.0, abs_sum = 0.0;
        for (auto k = n.begin; k < n.end; ++k) {
            sum += t.sorted_vortices()[k].gamma;
            abs_sum += std::abs(t.sorted_vortices()[k].gamma);
        }
        if (n.is_leaf())
            CHECK(n.total_gamma == sum);
        else
            CHECK(std::abs(n.total_gamma - sum) <= 1e-13 * abs_sum);
    }
}

TEST_CASE("build rejects invalid parameters") {
    const auto vs = oracle::random_vortices(10, 1);
    CHECK_THROWS_AS(VortexTree::build(vs, 0), std::invalid_argument);
    CHECK_THROWS_AS(VortexTree::build(vs, 8, -1), std::invalid_argument);
    CHECK_THROWS_AS(VortexTree::build(vs, 8, VortexTree::kMaxOrder + 1), std::invalid_argument);
    CHECK_THROWS_AS(VortexTree::build(vs).eval({}, -0.1), std::invalid_argument);
}

TEST_CASE("build is deterministic") {
    const auto vs = oracle::random_vortices(3000, 4);
    const VortexTree a = VortexTree::build(vs);
    const VortexTree b = VortexTree::build(vs);
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (int k = 0; k < 100; ++k) {
        const Vec2 x{0.1 * k - 5.0, 0.07 * k};
        const Vec2 ua = a.eval(x, 0.5), ub = b.eval(x, 0.5);
        CHECK(ua.x == ub.x);
        CHECK(ua.y == ub.y);
    }
}

TEST_CASE("theta_open = 0 reproduces direct summation") {
    const auto vs = oracle::random_vortices(2000, 21);
    const VortexTree t = VortexTree::build(vs);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> pos(-12.0, 12.0);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 e = oracle::biot_savart(vs, x);
        CHECK(norm(t.eval(x, 0.0) - e) <= 1e-14 * norm(e) + 1e-300);
    }
}

TEST_CASE("theta_open = 0.5 meets the accuracy targets") {
    const auto vs = oracle::random_vortices(2000, 8);
    const VortexTree t = VortexTree::build(vs);
    const Errors e = tree_error(vs, t, 0.5, 500, 99);
    MESSAGE("rms " << e.rms << " max " << e.max);
    CHECK(e.rms <= 1e-3);
    CHECK(e.max <= 1e-2);
}

TEST_CASE("error grows with the opening angle") {
    const auto vs = oracle::random_vortices(2000, 31);
    const VortexTree t = VortexTree::build(vs);
    CHECK(tree_error(vs, t, 0.3, 300, 5).rms <= tree_error(vs, t, 0.7, 300, 5).rms);
    const VortexTree mono = VortexTree::build(vs, 8, 0);
    CHECK(tree_error(vs, mono, 0.3, 300, 5).rms <= tree_error(vs, mono, 0.7, 300, 5).rms);
}

TEST_CASE("results do not depend on input order") {
    auto vs = oracle::random_vortices(1500, 12);
    const VortexTree a = VortexTree::build(vs);
    std::mt19937_64 rng(7);
    std::shuffle(vs.begin(), vs.end(), rng);
    const VortexTree b = VortexTree::build(vs);
    std::uniform_real_distribution<double> pos(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 ua = a.eval(x, 0.5), ub = b.eval(x, 0.5);
        CHECK(norm(ua - ub) <= 1e-12 * norm(ua));
    }
}

TEST_CASE("node aggregates match the exact node sum far away") {
    // Same-sign circulation: the centroid kills the dipole term, so the monopole alone is
    // accurate to second order in size/distance.
    auto vs = oracle::random_vortices(1000, 3);
    for (auto& v : vs) v.gamma = std::abs(v.gamma) + 0.1;
    const VortexTree t = VortexTree::build(vs);
    int checked = 0;
    for (const auto& n : t.nodes()) {
        if (n.end - n.begin < 2) continue;
        const Vec2 x = n.centroid + Vec2{80.0 * n.size(), 60.0 * n.size()};
        const Vec2 exact = t.node_exact(n, x);
        CHECK(norm(t.node_monopole(n, x) - exact) <= 1e-4 * norm(exact));
        ++checked;
    }
    CHECK(checked > 50);

    // Mixed signs leave a dipole about the |gamma| centroid; the stored expansion covers it.
    const auto mixed = oracle::random_vortices(1000, 4);
    const VortexTree m = VortexTree::build(mixed);
    for (std::size_t i = 0; i < m.nodes().size(); ++i) {
        const auto& n = m.nodes()[i];
        if (n.end - n.begin < 2) continue;
        const Vec2 x = n.centroid + Vec2{80.0 * n.size(), 60.0 * n.size()};
        const Vec2 exact = m.node_exact(n, x);
        CHECK(norm(m.node_expansion(i, x, m.expansion_order()) - exact) <= 1e-4 * norm(exact));
    }
}

TEST_CASE("higher expansion orders converge to the node sum") {
    const auto vs = oracle::random_vortices(500, 6);
    const VortexTree t = VortexTree::build(vs, 8, VortexTree::kMaxOrder);
    for (std::size_t i = 0; i < t.nodes().size(); ++i) {
        const auto& n = t.nodes()[i];
        if (n.depth != 2) continue;
        const Vec2 x = n.centroid + Vec2{3.0 * n.size(), -2.0 * n.size()};
        const Vec2 exact = t.node_exact(n, x);
        double prev = 1e300;
        for (int p = 0; p <= VortexTree::kMaxOrder; p += 2) {
            const double err = norm(t.node_expansion(i, x, p) - exact);
            CHECK(err <= prev * 1.0000001 + 1e-15);
            prev = err;
        }
        CHECK(prev <= 1e-3 * (n.abs_gamma / (kTwoPi * 3.0 * n.size())));
    }
}

TEST_CASE("negating every gamma negates the velocity") {
    auto vs = oracle::random_vortices(800, 9);
    const VortexTree a = VortexTree::build(vs);
    for (auto& v : vs) v.gamma = -v.gamma;
    const VortexTree b = VortexTree::build(vs);
    for (int k = 0; k < 50; ++k) {
        const Vec2 x{0.3 * k - 7.0, 2.0 - 0.1 * k};
        const Vec2 ua = a.eval(x, 0.5), ub = b.eval(x, 0.5);
        CHECK(ua.x == -ub.x);
        CHECK(ua.y == -ub.y);
    }
}

TEST_CASE("evaluating at every source matches pointwise eval exactly") {
    const auto vs = oracle::random_vortices(1500, 12);
    const VortexTree tree = VortexTree::build(vs);
    for (const double theta : {0.0, 0.5}) {
        const auto all = tree.eval_at_sources(theta);
        REQUIRE(all.size() == vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const Vec2 u = tree.eval(vs[i].position, theta);
            CHECK(all[i].x == u.x);
            CHECK(all[i].y == u.y);
        }
    }
    CHECK(VortexTree{}.eval_at_sources(0.5).empty());
}
