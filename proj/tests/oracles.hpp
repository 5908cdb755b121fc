// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used as independent oracles by the test
// suites. Everything here is written as plain index loops against the
// definitions, deliberately avoiding the library's flatten/contract
// machinery so the two computation paths stay independent.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "ttn/network.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn::testing {

/// Steps a mixed-radix counter; returns false after the last combination.
inline bool odometer(std::vector<std::int64_t>& idx, const std::vector<std::int64_t>& dims) {
    for (std::size_t k = idx.size(); k-- > 0;) {
        if (++idx[k] < dims[k]) return true;
        idx[k] = 0;
    }
    return false;
}

/// Direct elementwise evaluation of the contraction map: every output entry
/// is the sum over all bond index assignments of the product of local tensor
/// entries. Output axes are Physical(v) in ascending vertex order.
inline DenseTensor contract_reference(const TreeNetwork& net) {
    const TreeTopology& topo = net.topology();
    std::vector<VertexId> verts = topo.vertices();
    std::sort(verts.begin(), verts.end());

    std::vector<std::int64_t> out_dims;
    std::vector<AxisLabel> out_labels;
    for (VertexId v : verts) {
        out_dims.push_back(topo.phys_dim(v));
        out_labels.push_back(AxisLabel::physical(v));
    }

    std::vector<Edge> edges;
    std::vector<std::int64_t> bond_dims;
    for (const auto& [e, bond] : topo.edges()) {
        edges.push_back(e);
        bond_dims.push_back(bond);
    }

    DenseTensor out(out_dims, out_labels);
    std::vector<std::int64_t> phys_idx(verts.size(), 0);
    std::int64_t flat = 0;
    do {
        double sum = 0.0;
        std::vector<std::int64_t> bond_idx(edges.size(), 0);
        do {
            double prod = 1.0;
            for (std::size_t vi = 0; vi < verts.size(); ++vi) {
                const VertexId v = verts[vi];
                const DenseTensor& t = net.tensor(v);
                std::vector<std::int64_t> local_idx(t.order(), 0);
                for (std::size_t a = 0; a < t.order(); ++a) {
                    const AxisLabel& l = t.labels()[a];
                    if (l.kind == AxisLabel::Kind::Physical) {
                        local_idx[a] = phys_idx[vi];
                    } else {
                        const auto it = std::find(edges.begin(), edges.end(), l.edge);
                        local_idx[a] = bond_idx[static_cast<std::size_t>(it - edges.begin())];
                    }
                }
                prod *= t.at(local_idx);
            }
            sum += prod;
        } while (odometer(bond_idx, bond_dims));
        out.mutable_data()[static_cast<std::size_t>(flat++)] = sum;
    } while (odometer(phys_idx, out_dims));
    return out;
}

/// Loop-based unfolding: walks every tensor entry and places it at the
/// row-major (row, column) position dictated by the spec.
inline Matrix flatten_reference(const DenseTensor& t, const FlatteningSpec& spec) {
    std::vector<std::size_t> row_pos;
    std::vector<std::size_t> col_pos;
    for (const auto& l : spec.row_axes) row_pos.push_back(t.axis_index(l));
    for (const auto& l : spec.col_axes) col_pos.push_back(t.axis_index(l));

    std::int64_t rows = 1;
    for (std::size_t k : row_pos) rows *= t.dims()[k];
    std::int64_t cols = 1;
    for (std::size_t k : col_pos) cols *= t.dims()[k];

    Matrix m(rows, cols);
    std::vector<std::int64_t> idx(t.order(), 0);
    do {
        std::int64_t r = 0;
        for (std::size_t k : row_pos) r = r * t.dims()[k] + idx[k];
        std::int64_t c = 0;
        for (std::size_t k : col_pos) c = c * t.dims()[k] + idx[k];
        m(r, c) = t.at(idx);
    } while (odometer(idx, t.dims()));
    return m;
}

/// Loop-based single-mode product used to cross-check mode_multiply.
inline DenseTensor mode_multiply_reference(const DenseTensor& t, const Matrix& m,
                                           const AxisLabel& axis) {
    const std::size_t k = t.axis_index(axis);
    std::vector<std::int64_t> out_dims = t.dims();
    out_dims[k] = m.rows();
    DenseTensor out(out_dims, t.labels());
    std::vector<std::int64_t> idx(out.order(), 0);
    std::int64_t flat = 0;
    do {
        double sum = 0.0;
        std::vector<std::int64_t> src = idx;
        for (std::int64_t s = 0; s < t.dims()[k]; ++s) {
            src[k] = s;
            sum += m(idx[k], s) * t.at(src);
        }
        out.mutable_data()[static_cast<std::size_t>(flat++)] = sum;
    } while (odometer(idx, out_dims));
    return out;
}

/// Direct implementation of the star-graph minimality inequalities: every
/// center-to-leaf bond is at most the product of the other bonds, and at
/// most the leaf's physical dimension. The star has center `center` with
/// leaves and per-leaf (phys_dim, bond) pairs given in order.
inline bool star_admissible_reference(const std::vector<std::int64_t>& leaf_phys,
                                      const std::vector<std::int64_t>& bonds) {
    const std::size_t d = bonds.size();
    for (std::size_t i = 0; i < d; ++i) {
        std::int64_t prod = 1;
        for (std::size_t j = 0; j < d; ++j) {
            if (j != i) prod = saturating_mul(prod, bonds[j]);
        }
        if (bonds[i] > prod) return false;
        if (bonds[i] > leaf_phys[i]) return false;
    }
    return true;
}

} // namespace ttn::testing
