// SPDX-License-Identifier: Apache-2.0
//
// Command-line front-end: admissibility checks, network sampling,
// contraction, rank reports, reduction to minimal form, and genericity
// experiments over the JSON/TTN1 file formats.
//
// Exit codes: 0 success or affirmative verdict, 1 negative verdict,
// 2 input error, 3 local/global rank inconsistency.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ttn/ttn.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInconsistent = 3;

void emit(const ttn::Json& j) { std::cout << j.dump(2) << "\n"; }

int run_check(const std::string& topology_path) {
    const ttn::TreeTopology topo = ttn::read_topology_file(topology_path);
    const ttn::AdmissibilityVerdict verdict = ttn::is_admissible(topo);
    emit(ttn::verdict_to_json(verdict));
    if (verdict.admissible) {
        std::cerr << "admissible\n";
        return kExitOk;
    }
    std::cerr << verdict.violations.size() << " admissibility violation(s)\n";
    return kExitNegative;
}

int run_sample(const std::string& topology_path, const std::string& out_path,
               std::uint64_t seed) {
    const ttn::TreeTopology topo = ttn::read_topology_file(topology_path);
    const ttn::TreeNetwork net = ttn::sample_network(topo, seed);
    ttn::write_network_bundle(out_path, net);
    std::cerr << "sampled network with seed " << seed << " -> " << out_path << "\n";
    return kExitOk;
}

int run_contract(const std::string& bundle_path, const std::string& out_path,
                 std::int64_t memory_budget) {
    const ttn::TreeNetwork net = ttn::read_network_bundle(bundle_path);
    const ttn::DenseTensor full = ttn::contract(net, std::nullopt, memory_budget);
    ttn::write_json_file(out_path, ttn::tensor_to_json(full));
    std::cerr << "contracted " << net.topology().vertices().size() << " vertices into "
              << full.size() << " scalars -> " << out_path << "\n";
    return kExitOk;
}

int run_ranks(const std::string& bundle_path, double tol, bool verify_global,
              std::int64_t memory_budget) {
    const ttn::TreeNetwork net = ttn::read_network_bundle(bundle_path);
    ttn::MinimalityCertificate cert = ttn::check_minimality(net, tol);
    if (!verify_global) {
        emit(ttn::certificate_to_json(cert));
        std::cerr << (cert.minimal ? "minimal" : "not minimal") << "\n";
        return cert.minimal ? kExitOk : kExitNegative;
    }
    try {
        cert.report = ttn::cross_validate(net, tol, memory_budget);
    } catch (const ttn::InconsistencyDetected& ex) {
        cert.report = ex.report;
        ttn::Json j = ttn::certificate_to_json(cert);
        j["inconsistent_edges"] = ttn::Json::array();
        for (const auto& e : ex.edges) j["inconsistent_edges"].push_back(to_string(e));
        emit(j);
        std::cerr << ex.what() << "\n";
        return kExitInconsistent;
    }
    ttn::Json j = ttn::certificate_to_json(cert);
    j["inconsistent_edges"] = ttn::Json::array();
    emit(j);
    std::cerr << (cert.minimal ? "minimal" : "not minimal") << ", globally consistent\n";
    return cert.minimal ? kExitOk : kExitNegative;
}

int run_reduce(const std::string& bundle_path, const std::string& out_path, double tol,
               std::int64_t memory_budget) {
    const ttn::TreeNetwork net = ttn::read_network_bundle(bundle_path);
    auto [reduced, trace] = ttn::reduce_to_minimal(net, tol, memory_budget);
    ttn::write_network_bundle(out_path, reduced);
    emit(ttn::trace_to_json(trace));
    std::int64_t truncations = 0;
    for (const auto& s : trace.steps)
        if (s.new_bond < s.old_bond) ++truncations;
    std::cerr << truncations << " bond(s) reduced -> " << out_path << "\n";
    return kExitOk;
}

int run_genericity(const std::string& topology_path, std::int64_t trials,
                   std::uint64_t seed, double tol) {
    const ttn::TreeTopology topo = ttn::read_topology_file(topology_path);
    const ttn::GenericityResult result = ttn::genericity_experiment(topo, trials, seed, tol);
    emit(ttn::genericity_to_json(result));
    std::cerr << result.minimal_count << "/" << result.trials << " trials minimal\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tree tensor network bond-dimension tools"};
    app.require_subcommand(1);
    app.fallthrough();

    double tol = 1e-9;
    std::int64_t memory_budget = ttn::kDefaultMemoryBudget;
    std::uint64_t seed = 0;
    app.add_option("--tol", tol, "relative rank tolerance")->check(CLI::PositiveNumber);
    app.add_option("--memory-budget", memory_budget, "max scalars per contraction")
        ->check(CLI::Range(std::int64_t{1} << 16, std::int64_t{1} << 62));
    app.add_option("--seed", seed, "random seed");

    std::string topology_path;
    std::string bundle_path;
    std::string out_path;
    std::int64_t trials = 100;
    bool verify_global = false;

    auto* check = app.add_subcommand("check", "decide bond-dimension admissibility");
    check->add_option("topology", topology_path, "topology JSON file")->required();

    auto* sample = app.add_subcommand("sample", "sample a generic network");
    sample->add_option("topology", topology_path, "topology JSON file")->required();
    sample->add_option("-o,--out", out_path, "output bundle path")->required();

    auto* contract_cmd = app.add_subcommand("contract", "contract a network bundle");
    contract_cmd->add_option("bundle", bundle_path, "network bundle")->required();
    contract_cmd->add_option("-o,--out", out_path, "output tensor path")->required();

    auto* ranks = app.add_subcommand("ranks", "rank report and minimality certificate");
    ranks->add_option("bundle", bundle_path, "network bundle")->required();
    ranks->add_flag("--verify-global", verify_global,
                    "also cross-check against global edge-cut ranks");

    auto* reduce = app.add_subcommand("reduce", "reduce to minimal bond dimensions");
    reduce->add_option("bundle", bundle_path, "network bundle")->required();
    reduce->add_option("-o,--out", out_path, "output bundle path")->required();

    auto* genericity = app.add_subcommand("genericity", "sample many networks, count minimal");
    genericity->add_option("topology", topology_path, "topology JSON file")->required();
    genericity->add_option("--trials", trials, "number of trials")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (check->parsed()) return run_check(topology_path);
        if (sample->parsed()) return run_sample(topology_path, out_path, seed);
        if (contract_cmd->parsed())
            return run_contract(bundle_path, out_path, memory_budget);
        if (ranks->parsed()) return run_ranks(bundle_path, tol, verify_global, memory_budget);
        if (reduce->parsed()) return run_reduce(bundle_path, out_path, tol, memory_budget);
        if (genericity->parsed()) return run_genericity(topology_path, trials, seed, tol);
    } catch (const ttn::InconsistencyDetected& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInconsistent;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
