// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ttn/errors.hpp"
#include "ttn/network.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn {

struct ReductionStep {
    VertexId vertex{};
    VertexId neighbor{};
    std::int64_t old_bond{};
    std::int64_t new_bond{};
    double discarded{0.0}; // sum of singular values dropped by the truncation
};

struct ReductionTrace {
    std::vector<ReductionStep> steps;
    std::map<Edge, std::int64_t> before;
    std::map<Edge, std::int64_t> after;
    /// Relative Frobenius distance between the contracted tensors before and
    /// after; absent when the contraction exceeds the memory budget.
    std::optional<double> reconstruction_error;
};

namespace detail {

/// One exact-rank truncation on the bond {vertex, neighbor}: thin SVD of the
/// bond-row flattening of the vertex tensor, keep the rank-mu core side at
/// the vertex, absorb the orthonormal factor into the neighbor. Rank 0 is
/// clamped to bond 1 with a zero core.
inline TreeNetwork refactor_edge(const TreeNetwork& net, VertexId vertex,
                                 VertexId neighbor, double tol_rel,
                                 ReductionStep* step) {
    const Edge e(vertex, neighbor);
    if (!net.topology().has_edge(e)) throw Error("unknown edge " + to_string(e));

    const DenseTensor& t = net.tensor(vertex);
    const auto spec = FlatteningSpec::rows(t, {AxisLabel::bond(e)});
    const Matrix m = flatten(t, spec);
    if (!m.allFinite()) throw NonFiniteEntries("local tensor has NaN or Inf entries");

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sigma = svd.singularValues();
    const double sigma1 = sigma.size() > 0 ? sigma(0) : 0.0;
    std::int64_t mu = 0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma1 > 0.0 && sigma(k) > tol_rel * sigma1) ++mu;
    }
    const std::int64_t new_bond = std::max<std::int64_t>(mu, 1);
    const std::int64_t old_bond = net.topology().bond_dim(e);

    double discarded = 0.0;
    for (Eigen::Index k = new_bond; k < sigma.size(); ++k) discarded += sigma(k);

    const Matrix basis = svd.matrixU().leftCols(new_bond); // old_bond x new_bond
    const Matrix core = basis.transpose() * m;             // new_bond x rest

    std::vector<std::int64_t> new_dims = t.dims();
    new_dims[t.axis_index(AxisLabel::bond(e))] = new_bond;
    DenseTensor new_vertex = unflatten(core, spec, t.labels(), new_dims);
    DenseTensor new_neighbor =
        mode_multiply(net.tensor(neighbor), basis.transpose(), AxisLabel::bond(e));

    std::map<VertexId, DenseTensor> tensors = net.local_tensors();
    tensors.insert_or_assign(vertex, std::move(new_vertex));
    tensors.insert_or_assign(neighbor, std::move(new_neighbor));

    if (step) *step = {vertex, neighbor, old_bond, new_bond, discarded};
    return TreeNetwork(net.topology().with_bond(e, new_bond), std::move(tensors));
}

} // namespace detail

/// Single truncation step on the bond between `vertex` and `neighbor`. The
/// contracted tensor is preserved up to the discarded singular mass.
inline TreeNetwork local_tucker_refactor(const TreeNetwork& net, VertexId vertex,
                                         VertexId neighbor, double tol_rel) {
    return detail::refactor_edge(net, vertex, neighbor, tol_rel, nullptr);
}

/// Reduces a network to minimal bond dimensions by exact-rank hierarchical
/// SVD: a leaves-to-root sweep truncating each vertex toward its parent,
/// then a root-to-leaves sweep truncating each vertex toward each child.
inline std::pair<TreeNetwork, ReductionTrace>
reduce_to_minimal(const TreeNetwork& net, double tol_rel,
                  std::int64_t memory_budget = kDefaultMemoryBudget) {
    ReductionTrace trace;
    for (const auto& [e, bond] : net.topology().edges()) trace.before[e] = bond;

    std::optional<DenseTensor> original;
    try {
        original = contract(net, std::nullopt, memory_budget);
    } catch (const MemoryBudgetExceeded&) {
        original = std::nullopt;
    }

    const RootedView view = root_at(net.topology(), net.topology().default_root());
    TreeNetwork current = net;

    for (VertexId v : view.traversal) {
        const auto& parent = view.parent.at(v);
        if (!parent) continue;
        ReductionStep step;
        current = detail::refactor_edge(current, v, *parent, tol_rel, &step);
        trace.steps.push_back(step);
    }
    for (auto it = view.traversal.rbegin(); it != view.traversal.rend(); ++it) {
        for (VertexId c : view.children.at(*it)) {
            ReductionStep step;
            current = detail::refactor_edge(current, *it, c, tol_rel, &step);
            trace.steps.push_back(step);
        }
    }

    for (const auto& [e, bond] : current.topology().edges()) trace.after[e] = bond;
    if (original) {
        const DenseTensor reduced = contract(current, std::nullopt, memory_budget);
        trace.reconstruction_error = relative_error(*original, reduced);
    }
    return {std::move(current), std::move(trace)};
}

/// Ground-truth minimal bonds for representing `t` on `topology`: for each
/// edge, the numerical rank of the global flattening induced by cutting it,
/// clamped to at least 1.
inline std::map<Edge, std::int64_t>
minimal_bonds_oracle(const DenseTensor& t, const TreeTopology& topology, double tol_rel,
                     std::int64_t memory_budget = kDefaultMemoryBudget) {
    validate(topology);
    if (t.size() > memory_budget)
        throw MemoryBudgetExceeded("tensor of " + std::to_string(t.size()) +
                                   " scalars exceeds budget of " +
                                   std::to_string(memory_budget));
    if (t.order() != topology.vertices().size())
        throw ShapeMismatch("tensor order does not match vertex count");
    for (VertexId v : topology.vertices()) {
        const AxisLabel l = AxisLabel::physical(v);
        if (!t.has_axis(l) || t.dims()[t.axis_index(l)] != topology.phys_dim(v))
            throw ShapeMismatch("tensor lacks a physical axis of length " +
                                std::to_string(topology.phys_dim(v)) + " for vertex " +
                                std::to_string(v));
    }
    std::map<Edge, std::int64_t> bonds;
    for (const auto& [e, bond] : topology.edges()) {
        const RankResult rr = detail::edge_cut_details(t, topology, e, tol_rel);
        bonds[e] = std::max<std::int64_t>(rr.rank, 1);
    }
    return bonds;
}

} // namespace ttn
