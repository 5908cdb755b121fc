// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "ttn/errors.hpp"
#include "ttn/topology.hpp"

namespace ttn {

using Matrix = Eigen::MatrixXd;

/// Identifies what a tensor axis contracts against: the physical space of a
/// vertex, or the bond space of an edge. Dual bond spaces are not
/// distinguished; over the reals with fixed bases the pairing is the dot
/// product, so one label per edge suffices.
struct AxisLabel {
    enum class Kind : std::uint8_t { Physical, Bond };

    Kind kind{Kind::Physical};
    VertexId vertex{-1}; // set for Physical
    Edge edge{};         // set for Bond

    static AxisLabel physical(VertexId v) {
        AxisLabel l;
        l.kind = Kind::Physical;
        l.vertex = v;
        return l;
    }

    static AxisLabel bond(const Edge& e) {
        AxisLabel l;
        l.kind = Kind::Bond;
        l.edge = e;
        return l;
    }

    friend auto operator<=>(const AxisLabel&, const AxisLabel&) = default;
};

inline std::string to_string(const AxisLabel& l) {
    if (l.kind == AxisLabel::Kind::Physical)
        return "phys(" + std::to_string(l.vertex) + ")";
    return "bond(" + to_string(l.edge) + ")";
}

/// Dense tensor of 64-bit reals, row-major (last axis fastest), with one
/// label per axis. Immutable after construction.
class DenseTensor {
public:
    DenseTensor() : data_(1, 0.0) {} // order-0 scalar zero

    DenseTensor(std::vector<std::int64_t> dims, std::vector<AxisLabel> labels)
        : DenseTensor(std::move(dims), std::move(labels), {}) {}

    DenseTensor(std::vector<std::int64_t> dims, std::vector<AxisLabel> labels,
                std::vector<double> data)
        : dims_(std::move(dims)), labels_(std::move(labels)), data_(std::move(data)) {
        if (dims_.size() != labels_.size())
            throw AxisMismatch("got " + std::to_string(dims_.size()) + " dims but " +
                               std::to_string(labels_.size()) + " labels");
        std::int64_t total = 1;
        for (std::int64_t d : dims_) {
            if (d < 1)
                throw NonPositiveDimension("axis length " + std::to_string(d) + " < 1");
            total = saturating_mul(total, d);
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                if (labels_[i] == labels_[j])
                    throw AxisMismatch("duplicate axis label " + to_string(labels_[i]));
            }
        }
        if (data_.empty()) {
            data_.assign(static_cast<std::size_t>(total), 0.0);
        } else if (std::ssize(data_) != total) {
            throw ShapeMismatch("data length " + std::to_string(data_.size()) +
                                " does not match dim product " + std::to_string(total));
        }
    }

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::int64_t>& dims() const { return dims_; }
    const std::vector<AxisLabel>& labels() const { return labels_; }
    std::int64_t dim(std::size_t axis) const { return dims_.at(axis); }
    std::int64_t size() const { return std::ssize(data_); }

    std::span<const double> data() const { return data_; }
    std::span<double> mutable_data() { return data_; }

    bool has_axis(const AxisLabel& l) const {
        return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
    }

    std::size_t axis_index(const AxisLabel& l) const {
        auto it = std::find(labels_.begin(), labels_.end(), l);
        if (it == labels_.end())
            throw AxisMismatch("tensor has no axis " + to_string(l));
        return static_cast<std::size_t>(it - labels_.begin());
    }

    /// Row-major strides: stride of the last axis is 1.
    std::vector<std::int64_t> strides() const {
        std::vector<std::int64_t> s(dims_.size(), 1);
        for (std::size_t k = dims_.size(); k-- > 1;)
            s[k - 1] = s[k] * dims_[k];
        return s;
    }

    double at(std::span<const std::int64_t> idx) const {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }

    std::int64_t flat_index(std::span<const std::int64_t> idx) const {
        if (idx.size() != dims_.size())
            throw ShapeMismatch("index order mismatch");
        std::int64_t flat = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k)
            flat = flat * dims_[k] + idx[k];
        return flat;
    }

private:
    std::vector<std::int64_t> dims_;
    std::vector<AxisLabel> labels_;
    std::vector<double> data_;
};

/// Bipartition of a tensor's axes: row_axes become matrix rows (row-major
/// multi-index in the listed order), col_axes become columns.
struct FlatteningSpec {
    std::vector<AxisLabel> row_axes;
    std::vector<AxisLabel> col_axes;

    /// Spec with the given row axes; columns are the remaining axes of t in
    /// their original order.
    static FlatteningSpec rows(const DenseTensor& t, std::vector<AxisLabel> row_axes) {
        FlatteningSpec spec;
        spec.row_axes = std::move(row_axes);
        for (const auto& l : t.labels()) {
            if (std::find(spec.row_axes.begin(), spec.row_axes.end(), l) ==
                spec.row_axes.end())
                spec.col_axes.push_back(l);
        }
        return spec;
    }
};

namespace detail {

/// Checks that spec bipartitions exactly the given labels and returns the
/// positions of (row_axes..., col_axes...) within them.
inline std::vector<std::size_t> flattening_permutation(const std::vector<AxisLabel>& labels,
                                                       const FlatteningSpec& spec) {
    if (spec.row_axes.size() + spec.col_axes.size() != labels.size())
        throw AxisMismatch("flattening spec does not cover all axes");
    std::vector<std::size_t> perm;
    std::vector<bool> used(labels.size(), false);
    auto locate = [&](const AxisLabel& l) {
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k] == l) {
                if (used[k])
                    throw AxisMismatch("axis " + to_string(l) + " listed twice in spec");
                used[k] = true;
                return k;
            }
        }
        throw AxisMismatch("spec names axis " + to_string(l) + " absent from tensor");
    };
    for (const auto& l : spec.row_axes) perm.push_back(locate(l));
    for (const auto& l : spec.col_axes) perm.push_back(locate(l));
    return perm;
}

} // namespace detail

/// Reorders axes; entry values are copied verbatim.
inline DenseTensor permute_axes(const DenseTensor& t, std::span<const std::size_t> perm) {
    if (perm.size() != t.order()) throw AxisMismatch("permutation order mismatch");
    std::vector<std::int64_t> new_dims(perm.size());
    std::vector<AxisLabel> new_labels(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        new_dims[k] = t.dims()[perm[k]];
        new_labels[k] = t.labels()[perm[k]];
    }
    DenseTensor out(new_dims, new_labels);
    const auto src_strides = t.strides();
    std::vector<std::int64_t> out_strides_src(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        out_strides_src[k] = src_strides[perm[k]];

    std::span<double> dst = out.mutable_data();
    std::span<const double> src = t.data();
    std::vector<std::int64_t> idx(perm.size(), 0);
    std::int64_t src_flat = 0;
    for (std::int64_t flat = 0; flat < t.size(); ++flat) {
        dst[static_cast<std::size_t>(flat)] = src[static_cast<std::size_t>(src_flat)];
        // Odometer increment over the output multi-index.
        for (std::size_t k = perm.size(); k-- > 0;) {
            idx[k] += 1;
            src_flat += out_strides_src[k];
            if (idx[k] < new_dims[k]) break;
            src_flat -= idx[k] * out_strides_src[k];
            idx[k] = 0;
        }
    }
    return out;
}

/// Matrix unfolding: entry ((multi-index over row axes), (multi-index over
/// col axes)) equals the corresponding tensor entry, both multi-indices
/// row-major in the order listed by the spec.
inline Matrix flatten(const DenseTensor& t, const FlatteningSpec& spec) {
    const auto perm = detail::flattening_permutation(t.labels(), spec);
    const DenseTensor p = permute_axes(t, perm);
    std::int64_t rows = 1;
    for (std::size_t k = 0; k < spec.row_axes.size(); ++k) rows *= p.dims()[k];
    const std::int64_t cols = p.size() / std::max<std::int64_t>(rows, 1);
    Matrix m(rows, cols);
    std::span<const double> src = p.data();
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c)
            m(r, c) = src[static_cast<std::size_t>(r * cols + c)];
    return m;
}

/// Inverse of flatten: rebuilds a tensor with the given axis order and
/// lengths. flatten(unflatten(m, spec, ...), spec) == m bitwise.
inline DenseTensor unflatten(const Matrix& m, const FlatteningSpec& spec,
                             const std::vector<AxisLabel>& axes,
                             const std::vector<std::int64_t>& dims) {
    if (axes.size() != dims.size())
        throw AxisMismatch("axes/dims length mismatch");
    const auto perm = detail::flattening_permutation(axes, spec);
    std::vector<std::int64_t> perm_dims(perm.size());
    std::vector<AxisLabel> perm_labels(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        perm_dims[k] = dims[perm[k]];
        perm_labels[k] = axes[perm[k]];
    }
    std::int64_t rows = 1;
    for (std::size_t k = 0; k < spec.row_axes.size(); ++k) rows *= perm_dims[k];
    std::int64_t cols = 1;
    for (std::size_t k = spec.row_axes.size(); k < perm_dims.size(); ++k)
        cols *= perm_dims[k];
    if (m.rows() != rows || m.cols() != cols)
        throw ShapeMismatch("matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + " but spec implies " +
                            std::to_string(rows) + "x" + std::to_string(cols));

    DenseTensor permuted(perm_dims, perm_labels);
    std::span<double> dst = permuted.mutable_data();
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c)
            dst[static_cast<std::size_t>(r * cols + c)] = m(r, c);

    // Invert the permutation to restore the requested axis order.
    std::vector<std::size_t> inverse(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = k;
    return permute_axes(permuted, inverse);
}

struct RankResult {
    std::int64_t rank{0};
    std::vector<double> singular_values; // descending
};

/// Numerical rank with a relative threshold: rank = #{ sigma_i > tol_rel *
/// sigma_1 }. Scale invariant by construction; an empty or zero matrix has
/// rank 0.
inline RankResult numerical_rank(const Matrix& m, double tol_rel) {
    if (tol_rel <= 0.0) throw Error("tol_rel must be positive");
    if (m.rows() == 0 || m.cols() == 0) return {};
    if (!m.allFinite()) throw NonFiniteEntries("matrix has NaN or Inf entries");

    Eigen::BDCSVD<Matrix> svd(m);
    RankResult out;
    out.singular_values.assign(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    const double sigma1 = out.singular_values.empty() ? 0.0 : out.singular_values.front();
    if (sigma1 <= 0.0) {
        out.rank = 0;
        return out;
    }
    for (double s : out.singular_values) {
        if (s > tol_rel * sigma1) ++out.rank;
    }
    return out;
}

/// Contracts matrix m along the named axis: the axis length must equal
/// m.cols(); the result's axis length is m.rows(). Other axes unchanged.
inline DenseTensor mode_multiply(const DenseTensor& t, const Matrix& m,
                                 const AxisLabel& axis) {
    const std::size_t k = t.axis_index(axis);
    if (m.cols() != t.dims()[k])
        throw ShapeMismatch("matrix has " + std::to_string(m.cols()) +
                            " columns but axis " + to_string(axis) + " has length " +
                            std::to_string(t.dims()[k]));
    const auto spec = FlatteningSpec::rows(t, {axis});
    const Matrix product = m * flatten(t, spec);
    std::vector<std::int64_t> new_dims = t.dims();
    new_dims[k] = m.rows();
    return unflatten(product, spec, t.labels(), new_dims);
}

/// Rank of every single-axis unfolding, in axis order.
inline std::vector<std::int64_t> multilinear_rank(const DenseTensor& t, double tol_rel) {
    std::vector<std::int64_t> out;
    out.reserve(t.order());
    for (const auto& l : t.labels()) {
        const auto spec = FlatteningSpec::rows(t, {l});
        out.push_back(numerical_rank(flatten(t, spec), tol_rel).rank);
    }
    return out;
}

inline double frobenius_norm(const DenseTensor& t) {
    double sum = 0.0;
    for (double x : t.data()) sum += x * x;
    return std::sqrt(sum);
}

/// Relative Frobenius distance ||a - b|| / ||a||; absolute when ||a|| == 0.
/// Axes of b are aligned to a's by label.
inline double relative_error(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() != b.order()) throw AxisMismatch("tensor order mismatch");
    std::vector<std::size_t> perm;
    perm.reserve(a.order());
    for (const auto& l : a.labels()) perm.push_back(b.axis_index(l));
    const DenseTensor b_aligned = permute_axes(b, perm);
    if (a.dims() != b_aligned.dims()) throw ShapeMismatch("tensor shape mismatch");
    double diff = 0.0;
    double ref = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[static_cast<std::size_t>(i)] -
                         b_aligned.data()[static_cast<std::size_t>(i)];
        diff += d * d;
        ref += a.data()[static_cast<std::size_t>(i)] * a.data()[static_cast<std::size_t>(i)];
    }
    if (ref == 0.0) return std::sqrt(diff);
    return std::sqrt(diff / ref);
}

} // namespace ttn
