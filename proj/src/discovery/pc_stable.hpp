#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "discovery/lagged_dag.hpp"
#include "discovery/lagged_data.hpp"

namespace cfrca {

struct PcOptions {
    double alpha = 0.01;
    int max_depth = 3;
    // Variable treated as the failure sink when breaking orientation ties.
    std::string sink;
};

struct PcResult {
    LaggedDag dag;
    // Contemporaneous edges left undirected by colliders and Meek rules and
    // oriented by the sink / name-order prior.
    std::vector<Edge> prior_oriented;
    std::size_t ci_tests = 0;
};

// PC-stable over lag-augmented columns. Only pairs with at least one lag-0
// endpoint are ever adjacent; lagged edges point past -> present.
// Contemporaneous edges are oriented by unshielded colliders, then Meek
// rules R1-R3, then the sink prior (into the sink, otherwise toward the
// lexicographically larger variable), never closing a cycle.
PcResult pc_stable(const LaggedDataMatrix& data, const PcOptions& options = {});

}  // namespace cfrca
