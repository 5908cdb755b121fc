// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ttn/errors.hpp"

namespace ttn {

using VertexId = int;

/// Undirected edge between two vertices, stored canonically with u < v.
struct Edge {
    VertexId u{-1};
    VertexId v{-1};

    Edge() = default;
    Edge(VertexId a, VertexId b) : u(std::min(a, b)), v(std::max(a, b)) {}

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) {
    return std::to_string(e.u) + "-" + std::to_string(e.v);
}

/// Multiplies nonnegative integers, saturating at the int64 maximum.
/// A saturated value still decides "bond <= product" correctly because
/// the true product is at least as large.
inline std::int64_t saturating_mul(std::int64_t a, std::int64_t b) {
    constexpr std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    if (a == 0 || b == 0) return 0;
    if (a > cap / b) return cap;
    return a * b;
}

/// A tree graph with a physical dimension per vertex and a bond dimension
/// per edge. Construction records the data as given; structural invariants
/// (tree-ness, positive dimensions) are checked by validate() so that
/// malformed inputs can be diagnosed rather than rejected blindly.
class TreeTopology {
public:
    TreeTopology() = default;

    TreeTopology(std::vector<std::pair<VertexId, std::int64_t>> vertices,
                 std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges) {
        vertices_.reserve(vertices.size());
        for (const auto& [id, dim] : vertices) {
            vertices_.push_back(id);
            phys_dims_[id] = dim;
        }
        edges_.reserve(edges.size());
        for (const auto& [a, b, bond] : edges) {
            edges_.emplace_back(Edge(a, b), bond);
        }
    }

    const std::vector<VertexId>& vertices() const { return vertices_; }
    const std::vector<std::pair<Edge, std::int64_t>>& edges() const { return edges_; }

    bool has_vertex(VertexId v) const { return phys_dims_.count(v) > 0; }

    bool has_edge(const Edge& e) const {
        return std::any_of(edges_.begin(), edges_.end(),
                           [&](const auto& p) { return p.first == e; });
    }

    std::int64_t phys_dim(VertexId v) const {
        auto it = phys_dims_.find(v);
        if (it == phys_dims_.end())
            throw UnknownVertex("unknown vertex " + std::to_string(v));
        return it->second;
    }

    std::int64_t bond_dim(const Edge& e) const {
        for (const auto& [edge, bond] : edges_) {
            if (edge == e) return bond;
        }
        throw Error("unknown edge " + to_string(e));
    }

    /// Neighbors of v in ascending order.
    std::vector<VertexId> neighbors(VertexId v) const {
        std::vector<VertexId> out;
        for (const auto& [edge, bond] : edges_) {
            if (edge.u == v) out.push_back(edge.v);
            if (edge.v == v) out.push_back(edge.u);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Smallest vertex id; the default root for derived orientations.
    VertexId default_root() const {
        if (vertices_.empty()) throw Error("topology has no vertices");
        return *std::min_element(vertices_.begin(), vertices_.end());
    }

    /// Returns a copy with one bond dimension replaced.
    TreeTopology with_bond(const Edge& e, std::int64_t bond) const {
        TreeTopology out = *this;
        for (auto& [edge, b] : out.edges_) {
            if (edge == e) {
                b = bond;
                return out;
            }
        }
        throw Error("unknown edge " + to_string(e));
    }

private:
    std::vector<VertexId> vertices_;
    std::map<VertexId, std::int64_t> phys_dims_;
    std::vector<std::pair<Edge, std::int64_t>> edges_;
};

/// Orientation of a TreeTopology toward a chosen root.
struct RootedView {
    VertexId root{};
    std::map<VertexId, std::optional<VertexId>> parent;
    std::map<VertexId, std::vector<VertexId>> children;
    /// Every vertex appears after all of its children.
    std::vector<VertexId> traversal;
};

struct AdmissibilityViolation {
    VertexId vertex{};
    VertexId neighbor{};
    std::int64_t bond{};
    std::int64_t bound{};

    friend auto operator<=>(const AdmissibilityViolation&,
                            const AdmissibilityViolation&) = default;
};

struct AdmissibilityVerdict {
    bool admissible{true};
    std::vector<AdmissibilityViolation> violations;
};

/// Checks the TreeTopology invariants, throwing the first failure found:
/// DuplicateEdge, NonPositiveDimension, UnknownVertex (edge endpoint not a
/// vertex), CycleDetected, or Disconnected.
inline void validate(const TreeTopology& topo) {
    const auto& verts = topo.vertices();
    if (verts.empty()) throw Error("topology has no vertices");

    std::set<VertexId> seen;
    for (VertexId v : verts) {
        if (v < 0)
            throw Error("vertex ids must be nonnegative, got " + std::to_string(v));
        if (!seen.insert(v).second)
            throw Error("duplicate vertex id " + std::to_string(v));
        if (topo.phys_dim(v) < 1)
            throw NonPositiveDimension("phys_dim(" + std::to_string(v) + ") = " +
                                       std::to_string(topo.phys_dim(v)) + " < 1");
    }

    std::set<Edge> edge_set;
    for (const auto& [e, bond] : topo.edges()) {
        if (e.u == e.v)
            throw CycleDetected("self loop at vertex " + std::to_string(e.u));
        if (!seen.count(e.u) || !seen.count(e.v))
            throw UnknownVertex("edge " + to_string(e) + " references unknown vertex");
        if (!edge_set.insert(e).second)
            throw DuplicateEdge("duplicate edge " + to_string(e));
        if (bond < 1)
            throw NonPositiveDimension("bond_dim(" + to_string(e) + ") = " +
                                       std::to_string(bond) + " < 1");
    }

    // Union-find: an edge whose endpoints are already connected closes a
    // cycle; afterwards everything must sit in one component.
    std::map<VertexId, VertexId> rep;
    for (VertexId v : verts) rep[v] = v;
    auto find = [&](VertexId v) {
        while (rep[v] != v) {
            rep[v] = rep[rep[v]];
            v = rep[v];
        }
        return v;
    };
    for (const auto& [e, bond] : topo.edges()) {
        VertexId ru = find(e.u);
        VertexId rv = find(e.v);
        if (ru == rv)
            throw CycleDetected("edge " + to_string(e) + " closes a cycle");
        rep[ru] = rv;
    }
    const VertexId root_rep = find(verts.front());
    std::string missing;
    for (VertexId v : verts) {
        if (find(v) != root_rep) missing += " " + std::to_string(v);
    }
    if (!missing.empty())
        throw Disconnected("vertices not connected to " +
                           std::to_string(verts.front()) + ":" + missing);
}

/// Orients a valid topology toward `root`. The traversal is leaves-to-root;
/// children are listed in ascending vertex order.
inline RootedView root_at(const TreeTopology& topo, VertexId root) {
    validate(topo);
    if (!topo.has_vertex(root))
        throw UnknownVertex("root " + std::to_string(root) + " is not a vertex");

    RootedView view;
    view.root = root;
    for (VertexId v : topo.vertices()) {
        view.parent[v] = std::nullopt;
        view.children[v];
    }

    // Iterative post-order DFS, children visited in ascending order.
    std::vector<std::pair<VertexId, bool>> stack{{root, false}};
    std::set<VertexId> entered{root};
    while (!stack.empty()) {
        auto [v, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            view.traversal.push_back(v);
            continue;
        }
        stack.emplace_back(v, true);
        auto nbrs = topo.neighbors(v);
        // Push descending so ascending children are expanded first.
        for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
            if (entered.insert(*it).second) {
                view.parent[*it] = v;
                view.children[v].push_back(*it);
                stack.emplace_back(*it, false);
            }
        }
        std::sort(view.children[v].begin(), view.children[v].end());
    }
    return view;
}

/// Decides admissibility: at every vertex i and incident edge {i,j} the bond
/// must satisfy r_ij <= phys_dim(i) * prod of the other bonds at i. Products
/// saturate instead of overflowing.
inline AdmissibilityVerdict is_admissible(const TreeTopology& topo) {
    validate(topo);
    AdmissibilityVerdict verdict;
    for (VertexId i : topo.vertices()) {
        for (VertexId j : topo.neighbors(i)) {
            std::int64_t bound = topo.phys_dim(i);
            for (VertexId k : topo.neighbors(i)) {
                if (k == j) continue;
                bound = saturating_mul(bound, topo.bond_dim(Edge(i, k)));
            }
            const std::int64_t bond = topo.bond_dim(Edge(i, j));
            if (bond > bound)
                verdict.violations.push_back({i, j, bond, bound});
        }
    }
    verdict.admissible = verdict.violations.empty();
    return verdict;
}

} // namespace ttn
