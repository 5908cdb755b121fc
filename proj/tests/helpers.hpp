// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test suites: topology builders, deterministic
// random tensors, and the gauge constructions used to inflate or damage
// networks on purpose.

#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ttn/network.hpp"
#include "ttn/sampling.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn::testing {

/// Path graph 1-2-...-d.
inline TreeTopology path_topology(const std::vector<std::int64_t>& phys,
                                  const std::vector<std::int64_t>& bonds) {
    std::vector<std::pair<VertexId, std::int64_t>> verts;
    for (std::size_t i = 0; i < phys.size(); ++i)
        verts.emplace_back(static_cast<VertexId>(i + 1), phys[i]);
    std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges;
    for (std::size_t i = 0; i < bonds.size(); ++i)
        edges.emplace_back(static_cast<VertexId>(i + 1), static_cast<VertexId>(i + 2),
                           bonds[i]);
    return TreeTopology(std::move(verts), std::move(edges));
}

/// Star with center vertex 0 (phys dim 1 by default) and leaves 1..d.
inline TreeTopology star_topology(const std::vector<std::int64_t>& leaf_phys,
                                  const std::vector<std::int64_t>& bonds,
                                  std::int64_t center_phys = 1) {
    std::vector<std::pair<VertexId, std::int64_t>> verts{{0, center_phys}};
    std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges;
    for (std::size_t i = 0; i < leaf_phys.size(); ++i) {
        verts.emplace_back(static_cast<VertexId>(i + 1), leaf_phys[i]);
        edges.emplace_back(0, static_cast<VertexId>(i + 1), bonds[i]);
    }
    return TreeTopology(std::move(verts), std::move(edges));
}

inline DenseTensor random_tensor(std::vector<std::int64_t> dims,
                                 std::vector<AxisLabel> labels, std::uint64_t seed) {
    DenseTensor t(std::move(dims), std::move(labels));
    Xoshiro256StarStar rng(seed);
    for (double& x : t.mutable_data()) x = rng.normal();
    return t;
}

/// Axis labels 0..k-1 as physical labels of fictitious vertices, handy for
/// tensors that do not belong to a network.
inline std::vector<AxisLabel> generic_labels(std::size_t order) {
    std::vector<AxisLabel> labels;
    for (std::size_t k = 0; k < order; ++k)
        labels.push_back(AxisLabel::physical(static_cast<VertexId>(k)));
    return labels;
}

inline Matrix random_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Xoshiro256StarStar rng(seed);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

/// Replaces one local tensor, adjusting nothing else.
inline TreeNetwork replace_tensor(const TreeNetwork& net, VertexId v, DenseTensor t) {
    std::map<VertexId, DenseTensor> tensors = net.local_tensors();
    tensors.insert_or_assign(v, std::move(t));
    return TreeNetwork(net.topology(), std::move(tensors));
}

/// Inflates the bond on `e` to `new_bond` without changing the represented
/// tensor: both endpoint tensors are mode-multiplied by factors A and
/// B = A (A^T A)^{-1}, so the inserted pair contracts to the identity.
inline TreeNetwork inflate_bond(const TreeNetwork& net, const Edge& e,
                                std::int64_t new_bond, std::uint64_t seed) {
    const std::int64_t old_bond = net.topology().bond_dim(e);
    const Matrix a = random_matrix(new_bond, old_bond, seed);
    const Matrix b = a * (a.transpose() * a).inverse();

    std::map<VertexId, DenseTensor> tensors = net.local_tensors();
    tensors.insert_or_assign(e.u, mode_multiply(net.tensor(e.u), a, AxisLabel::bond(e)));
    tensors.insert_or_assign(e.v, mode_multiply(net.tensor(e.v), b, AxisLabel::bond(e)));
    return TreeNetwork(net.topology().with_bond(e, new_bond), std::move(tensors));
}

/// Gauge transformation on `e`: one endpoint multiplied by X, the other by
/// X^{-T}; the represented tensor is unchanged.
inline TreeNetwork gauge_transform(const TreeNetwork& net, const Edge& e,
                                   const Matrix& x) {
    std::map<VertexId, DenseTensor> tensors = net.local_tensors();
    const Matrix x_inv_t = x.inverse().transpose();
    tensors.insert_or_assign(e.u, mode_multiply(net.tensor(e.u), x, AxisLabel::bond(e)));
    tensors.insert_or_assign(e.v,
                             mode_multiply(net.tensor(e.v), x_inv_t, AxisLabel::bond(e)));
    return TreeNetwork(net.topology(), std::move(tensors));
}

} // namespace ttn::testing
