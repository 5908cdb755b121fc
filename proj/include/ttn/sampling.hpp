// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "ttn/network.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn {

/// xoshiro256** (Blackman & Vigna), state seeded through splitmix64.
/// Fixed generator so that identical seeds give identical streams on every
/// platform and run.
class Xoshiro256StarStar {
public:
    explicit Xoshiro256StarStar(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64 step
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1].
    double uniform01() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via the Box-Muller transform.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

/// Fills every local tensor with i.i.d. standard normals from a single
/// xoshiro256** stream: vertices in ascending order, entries row-major,
/// axes ordered physical-first then bonds by ascending neighbor. Identical
/// (topology, seed) pairs produce bitwise identical networks.
inline TreeNetwork sample_network(const TreeTopology& topology, std::uint64_t seed) {
    validate(topology);
    Xoshiro256StarStar rng(seed);
    std::vector<VertexId> order = topology.vertices();
    std::sort(order.begin(), order.end());

    std::map<VertexId, DenseTensor> tensors;
    for (VertexId v : order) {
        std::vector<std::int64_t> dims{topology.phys_dim(v)};
        std::vector<AxisLabel> labels{AxisLabel::physical(v)};
        for (VertexId k : topology.neighbors(v)) {
            dims.push_back(topology.bond_dim(Edge(v, k)));
            labels.push_back(AxisLabel::bond(Edge(v, k)));
        }
        DenseTensor t(dims, labels);
        for (double& x : t.mutable_data()) x = rng.normal();
        tensors.emplace(v, std::move(t));
    }
    return TreeNetwork(topology, std::move(tensors));
}

struct GenericityResult {
    std::int64_t trials{0};
    std::int64_t minimal_count{0};
    std::uint64_t seed{0};
    double tol_rel{0.0};
    /// Per trial, the smallest sigma_rank/sigma_1 ratio over all local
    /// flattenings: the margin by which the minimality verdict held.
    std::vector<double> failure_margins;
};

/// Samples `trials` networks with per-trial seeds seed+0, seed+1, ... and
/// counts how many pass the local minimality test.
inline GenericityResult genericity_experiment(const TreeTopology& topology,
                                              std::int64_t trials, std::uint64_t seed,
                                              double tol_rel) {
    validate(topology);
    GenericityResult result;
    result.trials = trials;
    result.seed = seed;
    result.tol_rel = tol_rel;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const TreeNetwork net =
            sample_network(topology, seed + static_cast<std::uint64_t>(trial));
        const MinimalityCertificate cert = check_minimality(net, tol_rel);
        if (cert.minimal) ++result.minimal_count;
        double margin = 1.0;
        for (const auto& [key, tail] : cert.report.effective_tails)
            margin = std::min(margin, tail.kept);
        result.failure_margins.push_back(margin);
    }
    return result;
}

} // namespace ttn
