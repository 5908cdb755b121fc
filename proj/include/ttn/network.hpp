// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ttn/errors.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn {

inline constexpr std::int64_t kDefaultMemoryBudget = std::int64_t{1} << 28;

/// A tree topology plus one local tensor per vertex. The local tensor at
/// vertex i carries exactly one Physical(i) axis of length phys_dim(i) and
/// one Bond({i,k}) axis of length bond_dim({i,k}) per neighbor k, in any
/// axis order.
class TreeNetwork {
public:
    TreeNetwork(TreeTopology topology, std::map<VertexId, DenseTensor> local_tensors)
        : topology_(std::move(topology)), tensors_(std::move(local_tensors)) {
        validate(topology_);
        for (VertexId v : topology_.vertices()) {
            auto it = tensors_.find(v);
            if (it == tensors_.end())
                throw ShapeMismatch("no local tensor for vertex " + std::to_string(v));
            const DenseTensor& t = it->second;
            const auto nbrs = topology_.neighbors(v);
            if (t.order() != nbrs.size() + 1)
                throw ShapeMismatch("local tensor at vertex " + std::to_string(v) +
                                    " has order " + std::to_string(t.order()) +
                                    ", expected " + std::to_string(nbrs.size() + 1));
            const AxisLabel phys = AxisLabel::physical(v);
            if (!t.has_axis(phys) ||
                t.dims()[t.axis_index(phys)] != topology_.phys_dim(v))
                throw ShapeMismatch("local tensor at vertex " + std::to_string(v) +
                                    " lacks a physical axis of length " +
                                    std::to_string(topology_.phys_dim(v)));
            for (VertexId k : nbrs) {
                const Edge e(v, k);
                const AxisLabel bond = AxisLabel::bond(e);
                if (!t.has_axis(bond) ||
                    t.dims()[t.axis_index(bond)] != topology_.bond_dim(e))
                    throw ShapeMismatch("local tensor at vertex " + std::to_string(v) +
                                        " lacks a bond axis " + to_string(e) +
                                        " of length " +
                                        std::to_string(topology_.bond_dim(e)));
            }
        }
        if (tensors_.size() != topology_.vertices().size())
            throw ShapeMismatch("local tensor for a vertex not in the topology");
    }

    const TreeTopology& topology() const { return topology_; }

    const DenseTensor& tensor(VertexId v) const {
        auto it = tensors_.find(v);
        if (it == tensors_.end())
            throw UnknownVertex("unknown vertex " + std::to_string(v));
        return it->second;
    }

    const std::map<VertexId, DenseTensor>& local_tensors() const { return tensors_; }

private:
    TreeTopology topology_;
    std::map<VertexId, DenseTensor> tensors_;
};

/// Ratios sigma_rank/sigma_1 (smallest kept) and sigma_{rank+1}/sigma_1
/// (largest discarded); zero when the respective value does not exist.
struct SingularTail {
    double kept{0.0};
    double discarded{0.0};
};

inline SingularTail singular_tail(const RankResult& rr) {
    SingularTail tail;
    if (rr.singular_values.empty() || rr.singular_values.front() <= 0.0) return tail;
    const double sigma1 = rr.singular_values.front();
    if (rr.rank > 0)
        tail.kept = rr.singular_values[static_cast<std::size_t>(rr.rank - 1)] / sigma1;
    if (rr.rank < std::ssize(rr.singular_values))
        tail.discarded = rr.singular_values[static_cast<std::size_t>(rr.rank)] / sigma1;
    return tail;
}

/// Measured ranks of a network: per-vertex effective multilinear ranks
/// (directed (vertex, neighbor) keys) and, when the full contraction was
/// computed, the global edge-cut ranks.
struct RankReport {
    std::map<std::pair<VertexId, VertexId>, std::int64_t> effective_ranks;
    std::map<Edge, std::int64_t> edge_cut_ranks;
    std::map<Edge, std::int64_t> bond_dims;
    double tol_rel{0.0};
    std::map<std::pair<VertexId, VertexId>, SingularTail> effective_tails;
    std::map<Edge, SingularTail> edge_cut_tails;
};

struct MinimalityFailure {
    VertexId vertex{};
    VertexId neighbor{};
    std::int64_t measured{};
    std::int64_t declared{};

    friend auto operator<=>(const MinimalityFailure&, const MinimalityFailure&) = default;
};

/// Verdict of the local minimality test: minimal iff every local flattening
/// toward an incident bond has rank equal to the declared bond dimension.
struct MinimalityCertificate {
    bool minimal{true};
    std::vector<MinimalityFailure> failures;
    RankReport report;
};

class InconsistencyDetected : public Error {
public:
    InconsistencyDetected(std::string msg, std::vector<Edge> edges, RankReport report)
        : Error(std::move(msg)), edges(std::move(edges)), report(std::move(report)) {}

    std::vector<Edge> edges;
    RankReport report;
};

/// Flattening of the local tensor at i with the bond toward j as the row
/// space and everything else (physical axis and remaining bonds) as columns.
inline Matrix local_bond_flattening(const TreeNetwork& net, VertexId i, VertexId j) {
    const DenseTensor& t = net.tensor(i);
    return flatten(t, FlatteningSpec::rows(t, {AxisLabel::bond(Edge(i, j))}));
}

namespace detail {

/// Contracts two tensors over one shared bond axis. Result axes: a's axes
/// minus the bond (a order), then b's axes minus the bond (b order).
inline DenseTensor contract_pair(const DenseTensor& a, const DenseTensor& b,
                                 const AxisLabel& bond, std::int64_t memory_budget) {
    const std::size_t ka = a.axis_index(bond);
    const std::size_t kb = b.axis_index(bond);
    if (a.dims()[ka] != b.dims()[kb])
        throw ShapeMismatch("bond length mismatch on " + to_string(bond));
    const std::int64_t len = a.dims()[ka];
    const std::int64_t out_size = saturating_mul(a.size() / len, b.size() / len);
    if (out_size > memory_budget)
        throw MemoryBudgetExceeded("intermediate of " + std::to_string(out_size) +
                                   " scalars exceeds budget of " +
                                   std::to_string(memory_budget));

    FlatteningSpec spec_a = FlatteningSpec::rows(a, {bond});
    std::swap(spec_a.row_axes, spec_a.col_axes); // rows = all but bond
    const Matrix ma = flatten(a, spec_a);
    const Matrix mb = flatten(b, FlatteningSpec::rows(b, {bond}));
    const Matrix prod = ma * mb;

    std::vector<AxisLabel> labels;
    std::vector<std::int64_t> dims;
    for (std::size_t k = 0; k < a.order(); ++k) {
        if (k == ka) continue;
        labels.push_back(a.labels()[k]);
        dims.push_back(a.dims()[k]);
    }
    const std::size_t split = labels.size();
    for (std::size_t k = 0; k < b.order(); ++k) {
        if (k == kb) continue;
        labels.push_back(b.labels()[k]);
        dims.push_back(b.dims()[k]);
    }
    FlatteningSpec out_spec;
    out_spec.row_axes.assign(labels.begin(), labels.begin() + split);
    out_spec.col_axes.assign(labels.begin() + split, labels.end());
    return unflatten(prod, out_spec, labels, dims);
}

/// Vertices of the component containing `start` after removing `banned`.
inline std::set<VertexId> component_of(const TreeTopology& topo, VertexId start,
                                       std::optional<Edge> banned) {
    std::set<VertexId> comp{start};
    std::vector<VertexId> queue{start};
    while (!queue.empty()) {
        VertexId v = queue.back();
        queue.pop_back();
        for (VertexId w : topo.neighbors(v)) {
            if (banned && Edge(v, w) == *banned) continue;
            if (comp.insert(w).second) queue.push_back(w);
        }
    }
    return comp;
}

/// Leaves-to-root contraction of the component containing `root`, never
/// crossing `banned`. At each vertex children are absorbed in ascending
/// order. The result carries the component's physical axes (ascending) and,
/// if banned is set, the banned bond axis last.
inline DenseTensor contract_rooted(const TreeNetwork& net, VertexId root,
                                   std::optional<Edge> banned,
                                   std::int64_t memory_budget) {
    const TreeTopology& topo = net.topology();
    if (!topo.has_vertex(root))
        throw UnknownVertex("unknown vertex " + std::to_string(root));

    // Orient the component toward root.
    std::map<VertexId, std::vector<VertexId>> children;
    std::vector<VertexId> order; // root-to-leaves
    std::set<VertexId> entered{root};
    std::vector<VertexId> queue{root};
    while (!queue.empty()) {
        VertexId v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (VertexId w : topo.neighbors(v)) {
            if (banned && Edge(v, w) == *banned) continue;
            if (entered.insert(w).second) {
                children[v].push_back(w);
                queue.push_back(w);
            }
        }
        std::sort(children[v].begin(), children[v].end());
    }

    std::map<VertexId, DenseTensor> partial;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        DenseTensor acc = net.tensor(v);
        for (VertexId c : children[v]) {
            acc = contract_pair(acc, partial.at(c), AxisLabel::bond(Edge(v, c)),
                                memory_budget);
            partial.erase(c);
        }
        partial.emplace(v, std::move(acc));
    }

    // Canonical axis order: physicals ascending, banned bond last.
    DenseTensor& result = partial.at(root);
    std::vector<std::pair<AxisLabel, std::size_t>> keyed;
    for (std::size_t k = 0; k < result.order(); ++k)
        keyed.emplace_back(result.labels()[k], k);
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
        const bool xb = x.first.kind == AxisLabel::Kind::Bond;
        const bool yb = y.first.kind == AxisLabel::Kind::Bond;
        if (xb != yb) return yb;
        return x.first < y.first;
    });
    std::vector<std::size_t> perm;
    perm.reserve(keyed.size());
    for (const auto& [l, k] : keyed) perm.push_back(k);
    return permute_axes(result, perm);
}

} // namespace detail

/// Contracts the whole network to its represented tensor. Axes of the
/// result are Physical(v) in ascending vertex order. The root only selects
/// the contraction order; the result is root-independent up to roundoff.
inline DenseTensor contract(const TreeNetwork& net,
                            std::optional<VertexId> root = std::nullopt,
                            std::int64_t memory_budget = kDefaultMemoryBudget) {
    const VertexId r = root.value_or(net.topology().default_root());
    return detail::contract_rooted(net, r, std::nullopt, memory_budget);
}

/// Contraction of the subtree on `a`'s side of edge {a,p}: the tensor with
/// the subtree's physical axes plus the cut bond axis. Its flattening with
/// the physicals as rows is the subtree-to-bond matrix of the edge-cut
/// analysis.
inline DenseTensor contract_subtree(const TreeNetwork& net, VertexId a, VertexId p,
                                    std::int64_t memory_budget = kDefaultMemoryBudget) {
    const Edge e(a, p);
    if (!net.topology().has_edge(e)) throw Error("unknown edge " + to_string(e));
    return detail::contract_rooted(net, a, e, memory_budget);
}

/// Effective multilinear rank at one vertex: for each neighbor j, the rank
/// of the local flattening with the bond toward j as the row space.
inline std::map<VertexId, std::int64_t> effective_multilinear_rank(const TreeNetwork& net,
                                                                   VertexId vertex,
                                                                   double tol_rel) {
    if (!net.topology().has_vertex(vertex))
        throw UnknownVertex("unknown vertex " + std::to_string(vertex));
    std::map<VertexId, std::int64_t> out;
    for (VertexId j : net.topology().neighbors(vertex))
        out[j] = numerical_rank(local_bond_flattening(net, vertex, j), tol_rel).rank;
    return out;
}

namespace detail {

inline RankResult edge_cut_details(const DenseTensor& full, const TreeTopology& topo,
                                   const Edge& e, double tol_rel) {
    const auto side = component_of(topo, e.u, e);
    std::vector<AxisLabel> rows;
    for (VertexId v : side) rows.push_back(AxisLabel::physical(v));
    return numerical_rank(flatten(full, FlatteningSpec::rows(full, rows)), tol_rel);
}

} // namespace detail

/// Rank of the global flattening induced by cutting one edge: contracts the
/// full network and splits the physical axes by the cut.
inline std::int64_t edge_cut_rank(const TreeNetwork& net, const Edge& edge, double tol_rel,
                                  std::int64_t memory_budget = kDefaultMemoryBudget) {
    if (!net.topology().has_edge(edge)) throw Error("unknown edge " + to_string(edge));
    const DenseTensor full = contract(net, std::nullopt, memory_budget);
    return detail::edge_cut_details(full, net.topology(), edge, tol_rel).rank;
}

/// Local minimality test: minimal iff every effective rank equals its
/// declared bond dimension. Never contracts the full network.
inline MinimalityCertificate check_minimality(const TreeNetwork& net, double tol_rel) {
    MinimalityCertificate cert;
    cert.report.tol_rel = tol_rel;
    for (const auto& [e, bond] : net.topology().edges())
        cert.report.bond_dims[e] = bond;
    for (VertexId i : net.topology().vertices()) {
        for (VertexId j : net.topology().neighbors(i)) {
            const RankResult rr = numerical_rank(local_bond_flattening(net, i, j), tol_rel);
            cert.report.effective_ranks[{i, j}] = rr.rank;
            cert.report.effective_tails[{i, j}] = singular_tail(rr);
            const std::int64_t declared = net.topology().bond_dim(Edge(i, j));
            if (rr.rank < declared)
                cert.failures.push_back({i, j, rr.rank, declared});
        }
    }
    cert.minimal = cert.failures.empty();
    return cert;
}

/// Global cross-check of the local certificate. Contracts the network and
/// measures every edge-cut rank. Inconsistent edges are those where the
/// local and global verdicts cannot both be right: a minimal certificate
/// with a cut rank below the bond, or a cut rank exceeding the effective
/// ranks it factors through.
inline RankReport cross_validate(const TreeNetwork& net, double tol_rel,
                                 std::int64_t memory_budget = kDefaultMemoryBudget) {
    MinimalityCertificate cert = check_minimality(net, tol_rel);
    RankReport report = std::move(cert.report);
    const DenseTensor full = contract(net, std::nullopt, memory_budget);
    std::vector<Edge> inconsistent;
    for (const auto& [e, bond] : net.topology().edges()) {
        const RankResult rr = detail::edge_cut_details(full, net.topology(), e, tol_rel);
        report.edge_cut_ranks[e] = rr.rank;
        report.edge_cut_tails[e] = singular_tail(rr);
        const std::int64_t local_min = std::min(report.effective_ranks.at({e.u, e.v}),
                                                report.effective_ranks.at({e.v, e.u}));
        if ((cert.minimal && rr.rank != bond) || rr.rank > local_min)
            inconsistent.push_back(e);
    }
    if (!inconsistent.empty()) {
        std::string msg = "local certificate and global ranks disagree on edges:";
        for (const Edge& e : inconsistent) msg += " " + to_string(e);
        throw InconsistencyDetected(msg, std::move(inconsistent), std::move(report));
    }
    return report;
}

} // namespace ttn
