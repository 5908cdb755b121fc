// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttn/errors.hpp"
#include "ttn/network.hpp"
#include "ttn/reduction.hpp"
#include "ttn/sampling.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"

namespace ttn {

using Json = nlohmann::ordered_json;

/// Tensors with at most this many scalars are stored inline in bundle
/// manifests; larger ones go to binary side files.
inline constexpr std::int64_t kInlineTensorThreshold = 4096;

// -------------------------------------------------------------------------
// Topology files: {"vertices": [{"id": 1, "phys_dim": 4}, ...],
//                  "edges": [{"u": 1, "v": 2, "bond": 3}, ...]}
// Edges are written with u < v; readers accept either order.
// -------------------------------------------------------------------------

inline Json topology_to_json(const TreeTopology& topo) {
    Json j;
    j["vertices"] = Json::array();
    for (VertexId v : topo.vertices())
        j["vertices"].push_back({{"id", v}, {"phys_dim", topo.phys_dim(v)}});
    j["edges"] = Json::array();
    for (const auto& [e, bond] : topo.edges())
        j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"bond", bond}});
    return j;
}

inline TreeTopology topology_from_json(const Json& j) {
    try {
        std::vector<std::pair<VertexId, std::int64_t>> vertices;
        for (const auto& v : j.at("vertices"))
            vertices.emplace_back(v.at("id").get<VertexId>(),
                                  v.at("phys_dim").get<std::int64_t>());
        std::vector<std::tuple<VertexId, VertexId, std::int64_t>> edges;
        for (const auto& e : j.at("edges"))
            edges.emplace_back(e.at("u").get<VertexId>(), e.at("v").get<VertexId>(),
                               e.at("bond").get<std::int64_t>());
        return TreeTopology(std::move(vertices), std::move(edges));
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bad topology: ") + ex.what());
    }
}

// -------------------------------------------------------------------------
// Axis labels: {"physical": 1} or {"bond": [1, 2]}
// -------------------------------------------------------------------------

inline Json label_to_json(const AxisLabel& l) {
    if (l.kind == AxisLabel::Kind::Physical) return Json{{"physical", l.vertex}};
    return Json{{"bond", Json::array({l.edge.u, l.edge.v})}};
}

inline AxisLabel label_from_json(const Json& j) {
    try {
        if (j.contains("physical"))
            return AxisLabel::physical(j.at("physical").get<VertexId>());
        if (j.contains("bond")) {
            const auto& b = j.at("bond");
            return AxisLabel::bond(Edge(b.at(0).get<VertexId>(), b.at(1).get<VertexId>()));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bad axis label: ") + ex.what());
    }
    throw ParseError("axis label must contain \"physical\" or \"bond\"");
}

// -------------------------------------------------------------------------
// Tensor files.
// JSON: {"dims": [...], "labels": [...], "data": [... row-major ...]}
// Binary "TTN1": magic, u32 LE order, order x u32 LE dims, f64 LE data.
// Labels for binary tensors live in the referencing manifest.
// -------------------------------------------------------------------------

inline Json tensor_to_json(const DenseTensor& t) {
    Json j;
    j["dims"] = t.dims();
    j["labels"] = Json::array();
    for (const auto& l : t.labels()) j["labels"].push_back(label_to_json(l));
    j["data"] = Json::array();
    for (double x : t.data()) j["data"].push_back(x);
    return j;
}

inline DenseTensor tensor_from_json(const Json& j) {
    try {
        std::vector<std::int64_t> dims = j.at("dims").get<std::vector<std::int64_t>>();
        std::vector<AxisLabel> labels;
        for (const auto& l : j.at("labels")) labels.push_back(label_from_json(l));
        std::vector<double> data = j.at("data").get<std::vector<double>>();
        return DenseTensor(std::move(dims), std::move(labels), std::move(data));
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bad tensor: ") + ex.what());
    }
}

inline void write_tensor_binary(const std::filesystem::path& path, const DenseTensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out.write("TTN1", 4);
    const auto put_u32 = [&](std::uint32_t x) {
        unsigned char buf[4];
        for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(x >> (8 * i));
        out.write(reinterpret_cast<const char*>(buf), 4);
    };
    put_u32(static_cast<std::uint32_t>(t.order()));
    for (std::int64_t d : t.dims()) put_u32(static_cast<std::uint32_t>(d));
    for (double x : t.data()) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
        out.write(reinterpret_cast<const char*>(buf), 8);
    }
    if (!out) throw ParseError("failed writing " + path.string());
}

inline DenseTensor read_tensor_binary(const std::filesystem::path& path,
                                      std::vector<AxisLabel> labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TTN1", 4) != 0)
        throw ParseError(path.string() + " is not a TTN1 tensor file");
    const auto get_u32 = [&]() {
        unsigned char buf[4];
        in.read(reinterpret_cast<char*>(buf), 4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
        return x;
    };
    const std::uint32_t order = get_u32();
    std::vector<std::int64_t> dims;
    std::int64_t total = 1;
    for (std::uint32_t k = 0; k < order; ++k) {
        dims.push_back(static_cast<std::int64_t>(get_u32()));
        total *= dims.back();
    }
    if (!in) throw ParseError("truncated header in " + path.string());
    std::vector<double> data(static_cast<std::size_t>(total));
    for (double& x : data) {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        std::memcpy(&x, &bits, 8);
    }
    if (!in) throw ParseError("truncated data in " + path.string());
    return DenseTensor(std::move(dims), std::move(labels), std::move(data));
}

// -------------------------------------------------------------------------
// Network bundles: {"topology": {...}, "tensors": {"1": <tensor> | {"file":
// "v1.ttn", "labels": [...]}, ...}}. Side files are resolved relative to
// the manifest's directory.
// -------------------------------------------------------------------------

inline Json network_to_json(const TreeNetwork& net, const std::filesystem::path& dir,
                            std::int64_t inline_threshold = kInlineTensorThreshold) {
    Json j;
    j["topology"] = topology_to_json(net.topology());
    j["tensors"] = Json::object();
    std::vector<VertexId> order = net.topology().vertices();
    std::sort(order.begin(), order.end());
    for (VertexId v : order) {
        const DenseTensor& t = net.tensor(v);
        const std::string key = std::to_string(v);
        if (t.size() <= inline_threshold) {
            j["tensors"][key] = tensor_to_json(t);
        } else {
            const std::string file = "v" + key + ".ttn";
            write_tensor_binary(dir / file, t);
            Json entry;
            entry["file"] = file;
            entry["labels"] = Json::array();
            for (const auto& l : t.labels()) entry["labels"].push_back(label_to_json(l));
            j["tensors"][key] = std::move(entry);
        }
    }
    return j;
}

inline TreeNetwork network_from_json(const Json& j, const std::filesystem::path& dir) {
    TreeTopology topo = topology_from_json(j.at("topology"));
    std::map<VertexId, DenseTensor> tensors;
    try {
        for (const auto& [key, entry] : j.at("tensors").items()) {
            const VertexId v = std::stoi(key);
            if (entry.contains("file")) {
                std::vector<AxisLabel> labels;
                for (const auto& l : entry.at("labels"))
                    labels.push_back(label_from_json(l));
                tensors.emplace(
                    v, read_tensor_binary(dir / entry.at("file").get<std::string>(),
                                          std::move(labels)));
            } else {
                tensors.emplace(v, tensor_from_json(entry));
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("bad network bundle: ") + ex.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("tensor keys must be vertex ids");
    }
    return TreeNetwork(std::move(topo), std::move(tensors));
}

// -------------------------------------------------------------------------
// File helpers
// -------------------------------------------------------------------------

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(path.string() + ": " + ex.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw ParseError("failed writing " + path.string());
}

inline TreeTopology read_topology_file(const std::filesystem::path& path) {
    return topology_from_json(read_json_file(path));
}

inline TreeNetwork read_network_bundle(const std::filesystem::path& path) {
    return network_from_json(read_json_file(path), path.parent_path());
}

inline void write_network_bundle(const std::filesystem::path& path, const TreeNetwork& net,
                                 std::int64_t inline_threshold = kInlineTensorThreshold) {
    write_json_file(path, network_to_json(net, path.parent_path(), inline_threshold));
}

// -------------------------------------------------------------------------
// Report serialization. Keys are inserted in sorted order so output bytes
// are a deterministic function of the content.
// -------------------------------------------------------------------------

inline std::string directed_key(VertexId i, VertexId j) {
    return std::to_string(i) + "->" + std::to_string(j);
}

inline Json verdict_to_json(const AdmissibilityVerdict& v) {
    Json j;
    j["admissible"] = v.admissible;
    j["violations"] = Json::array();
    for (const auto& viol : v.violations)
        j["violations"].push_back({{"vertex", viol.vertex},
                                   {"neighbor", viol.neighbor},
                                   {"bond", viol.bond},
                                   {"bound", viol.bound}});
    return j;
}

inline Json report_to_json(const RankReport& r) {
    Json j;
    j["tol_rel"] = r.tol_rel;
    j["bond_dims"] = Json::object();
    for (const auto& [e, bond] : r.bond_dims) j["bond_dims"][to_string(e)] = bond;
    j["effective_ranks"] = Json::object();
    for (const auto& [key, rank] : r.effective_ranks)
        j["effective_ranks"][directed_key(key.first, key.second)] = rank;
    j["edge_cut_ranks"] = Json::object();
    for (const auto& [e, rank] : r.edge_cut_ranks) j["edge_cut_ranks"][to_string(e)] = rank;
    j["singular_tails"] = Json::object();
    for (const auto& [key, tail] : r.effective_tails)
        j["singular_tails"][directed_key(key.first, key.second)] =
            Json::array({tail.kept, tail.discarded});
    for (const auto& [e, tail] : r.edge_cut_tails)
        j["singular_tails"][to_string(e)] = Json::array({tail.kept, tail.discarded});
    return j;
}

inline Json certificate_to_json(const MinimalityCertificate& c) {
    Json j;
    j["minimal"] = c.minimal;
    j["failures"] = Json::array();
    for (const auto& f : c.failures)
        j["failures"].push_back({{"vertex", f.vertex},
                                 {"neighbor", f.neighbor},
                                 {"measured", f.measured},
                                 {"declared", f.declared}});
    j["report"] = report_to_json(c.report);
    return j;
}

inline Json trace_to_json(const ReductionTrace& t) {
    Json j;
    j["steps"] = Json::array();
    for (const auto& s : t.steps)
        j["steps"].push_back({{"vertex", s.vertex},
                              {"neighbor", s.neighbor},
                              {"old", s.old_bond},
                              {"new", s.new_bond},
                              {"discarded", s.discarded}});
    j["before"] = Json::object();
    for (const auto& [e, bond] : t.before) j["before"][to_string(e)] = bond;
    j["after"] = Json::object();
    for (const auto& [e, bond] : t.after) j["after"][to_string(e)] = bond;
    if (t.reconstruction_error)
        j["reconstruction_error"] = *t.reconstruction_error;
    else
        j["reconstruction_error"] = nullptr;
    return j;
}

inline Json genericity_to_json(const GenericityResult& g) {
    Json j;
    j["trials"] = g.trials;
    j["minimal_count"] = g.minimal_count;
    j["seed"] = g.seed;
    j["tol_rel"] = g.tol_rel;
    j["failure_margins"] = g.failure_margins;
    return j;
}

} // namespace ttn
