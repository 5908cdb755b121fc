// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "oracles.hpp"
#include "ttn/topology.hpp"

using namespace ttn;
using namespace ttn::testing;

TEST_CASE("validate accepts a path graph") {
    REQUIRE_NOTHROW(validate(path_topology({2, 2, 2}, {2, 2})));
}

TEST_CASE("validate accepts a single vertex without edges") {
    REQUIRE_NOTHROW(validate(TreeTopology({{1, 3}}, {})));
}

TEST_CASE("validate rejects a triangle") {
    TreeTopology topo({{1, 2}, {2, 2}, {3, 2}}, {{1, 2, 1}, {2, 3, 1}, {3, 1, 1}});
    REQUIRE_THROWS_AS(validate(topo), CycleDetected);
}

TEST_CASE("validate rejects an isolated vertex") {
    TreeTopology topo({{1, 2}, {2, 2}, {3, 2}}, {{1, 2, 1}});
    REQUIRE_THROWS_AS(validate(topo), Disconnected);
}

TEST_CASE("validate rejects duplicate edges regardless of orientation") {
    TreeTopology topo({{1, 2}, {2, 2}}, {{1, 2, 1}, {2, 1, 1}});
    REQUIRE_THROWS_AS(validate(topo), DuplicateEdge);
}

TEST_CASE("validate rejects nonpositive dimensions") {
    REQUIRE_THROWS_AS(validate(TreeTopology({{1, 0}, {2, 2}}, {{1, 2, 1}})),
                      NonPositiveDimension);
    REQUIRE_THROWS_AS(validate(TreeTopology({{1, 2}, {2, 2}}, {{1, 2, 0}})),
                      NonPositiveDimension);
}

TEST_CASE("validate rejects edges naming unknown vertices") {
    REQUIRE_THROWS_AS(validate(TreeTopology({{1, 2}, {2, 2}}, {{1, 3, 1}})),
                      UnknownVertex);
}

TEST_CASE("root_at orients a path toward its end") {
    const auto view = root_at(path_topology({2, 2, 2}, {2, 2}), 3);
    REQUIRE(view.parent.at(1) == 2);
    REQUIRE(view.parent.at(2) == 3);
    REQUIRE_FALSE(view.parent.at(3).has_value());
    REQUIRE(view.traversal == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("root_at on a single vertex") {
    const auto view = root_at(TreeTopology({{1, 3}}, {}), 1);
    REQUIRE_FALSE(view.parent.at(1).has_value());
    REQUIRE(view.traversal == std::vector<VertexId>{1});
}

TEST_CASE("root_at on a star centers every parent pointer") {
    const auto topo = star_topology({2, 2, 2, 2}, {1, 1, 1, 1});
    const auto view = root_at(topo, 0);
    for (VertexId leaf : {1, 2, 3, 4}) REQUIRE(view.parent.at(leaf) == 0);
    REQUIRE(view.children.at(0) == std::vector<VertexId>{1, 2, 3, 4});
    REQUIRE(view.traversal.back() == 0);
}

TEST_CASE("root_at rejects an unknown root") {
    REQUIRE_THROWS_AS(root_at(path_topology({2, 2}, {1}), 9), UnknownVertex);
}

TEST_CASE("traversal places every vertex after its children") {
    const auto topo = TreeTopology({{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}},
                                   {{1, 2, 2}, {2, 3, 2}, {2, 4, 2}, {4, 5, 2}});
    for (VertexId root : {1, 2, 3, 4, 5}) {
        const auto view = root_at(topo, root);
        std::map<VertexId, std::size_t> pos;
        for (std::size_t i = 0; i < view.traversal.size(); ++i)
            pos[view.traversal[i]] = i;
        REQUIRE(view.traversal.size() == 5);
        for (const auto& [v, kids] : view.children)
            for (VertexId c : kids) REQUIRE(pos.at(c) < pos.at(v));
    }
}

TEST_CASE("star with bonds (2,2,5) is inadmissible at the center") {
    const auto verdict = is_admissible(star_topology({10, 10, 10}, {2, 2, 5}));
    REQUIRE_FALSE(verdict.admissible);
    REQUIRE(verdict.violations.size() == 1);
    REQUIRE(verdict.violations[0].vertex == 0);
    REQUIRE(verdict.violations[0].neighbor == 3);
    REQUIRE(verdict.violations[0].bond == 5);
    REQUIRE(verdict.violations[0].bound == 4);
}

TEST_CASE("star with bonds (2,2,4) sits exactly on the boundary") {
    const auto verdict = is_admissible(star_topology({10, 10, 10}, {2, 2, 4}));
    REQUIRE(verdict.admissible);
}

TEST_CASE("all-ones bonds are always admissible") {
    REQUIRE(is_admissible(path_topology({1, 5, 2, 1}, {1, 1, 1})).admissible);
    REQUIRE(is_admissible(star_topology({1, 1, 1}, {1, 1, 1})).admissible);
}

TEST_CASE("two-vertex bond above a physical dimension is inadmissible") {
    const TreeTopology topo({{1, 4}, {2, 6}}, {{1, 2, 5}});
    const auto verdict = is_admissible(topo);
    REQUIRE_FALSE(verdict.admissible);
    REQUIRE(verdict.violations.size() == 1);
    REQUIRE(verdict.violations[0].vertex == 1);
    REQUIRE(verdict.violations[0].neighbor == 2);
}

TEST_CASE("admissibility matches the direct star inequalities") {
    Xoshiro256StarStar rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + rng.next() % 4;
        std::vector<std::int64_t> phys(d);
        std::vector<std::int64_t> bonds(d);
        for (auto& p : phys) p = 1 + static_cast<std::int64_t>(rng.next() % 6);
        for (auto& b : bonds) b = 1 + static_cast<std::int64_t>(rng.next() % 6);
        const bool expected = star_admissible_reference(phys, bonds);
        REQUIRE(is_admissible(star_topology(phys, bonds)).admissible == expected);
    }
}

TEST_CASE("admissibility is invariant under vertex relabeling") {
    Xoshiro256StarStar rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> phys(4);
        std::vector<std::int64_t> bonds(3);
        for (auto& p : phys) p = 1 + static_cast<std::int64_t>(rng.next() % 4);
        for (auto& b : bonds) b = 1 + static_cast<std::int64_t>(rng.next() % 4);
        const auto topo = path_topology(phys, bonds);
        // Relabel v -> 10 - v, reversing the order of ids.
        std::vector<std::pair<VertexId, std::int64_t>> verts;
        for (VertexId v : topo.vertices()) verts.emplace_back(10 - v, topo.phys_dim(v));
        std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges;
        for (const auto& [e, bond] : topo.edges())
            edges.emplace_back(10 - e.u, 10 - e.v, bond);
        const TreeTopology relabeled(verts, edges);

        const auto a = is_admissible(topo);
        const auto b = is_admissible(relabeled);
        REQUIRE(a.admissible == b.admissible);
        REQUIRE(a.violations.size() == b.violations.size());
        for (const auto& viol : a.violations) {
            const bool found = std::any_of(
                b.violations.begin(), b.violations.end(), [&](const auto& w) {
                    return w.vertex == 10 - viol.vertex && w.neighbor == 10 - viol.neighbor;
                });
            REQUIRE(found);
        }
    }
}

TEST_CASE("lowering one bond never creates a new violation at that edge") {
    // Exhaustive over a fixed family of trees with <= 5 vertices and bonds
    // in {1,2,3}.
    const std::vector<std::vector<std::pair<VertexId, VertexId>>> shapes = {
        {{1, 2}},
        {{1, 2}, {2, 3}},
        {{1, 2}, {2, 3}, {3, 4}},
        {{1, 2}, {1, 3}, {1, 4}},
        {{1, 2}, {2, 3}, {3, 4}, {4, 5}},
        {{1, 2}, {1, 3}, {1, 4}, {1, 5}},
        {{1, 2}, {2, 3}, {2, 4}, {4, 5}},
    };
    for (const auto& shape : shapes) {
        std::set<VertexId> vert_set;
        for (const auto& [u, v] : shape) {
            vert_set.insert(u);
            vert_set.insert(v);
        }
        std::vector<std::pair<VertexId, std::int64_t>> verts;
        for (VertexId v : vert_set) verts.emplace_back(v, 1 + (v % 3));

        const std::vector<std::int64_t> radix(shape.size(), 3);
        std::vector<std::int64_t> counter(shape.size(), 0);
        do {
            std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges;
            for (std::size_t k = 0; k < shape.size(); ++k)
                edges.emplace_back(shape[k].first, shape[k].second, counter[k] + 1);
            const TreeTopology topo(verts, edges);
            const auto verdict = is_admissible(topo);
            auto violated = [&](const AdmissibilityVerdict& v, const Edge& e) {
                return std::any_of(v.violations.begin(), v.violations.end(),
                                   [&](const auto& w) {
                                       return Edge(w.vertex, w.neighbor) == e;
                                   });
            };
            for (std::size_t k = 0; k < shape.size(); ++k) {
                const std::int64_t bond = counter[k] + 1;
                if (bond == 1) continue;
                const Edge e(shape[k].first, shape[k].second);
                const auto lowered = is_admissible(topo.with_bond(e, bond - 1));
                if (!violated(verdict, e)) REQUIRE_FALSE(violated(lowered, e));
            }
        } while (odometer(counter, radix));
    }
}

TEST_CASE("saturating products decide oversized comparisons correctly") {
    // Deep star with huge bonds: the product saturates but stays above any
    // single bond, so the tuple is admissible at the center.
    std::vector<std::int64_t> phys(8, std::int64_t{1} << 40);
    std::vector<std::int64_t> bonds(8, std::int64_t{1} << 40);
    const auto verdict = is_admissible(star_topology(phys, bonds));
    REQUIRE(verdict.admissible);
}
