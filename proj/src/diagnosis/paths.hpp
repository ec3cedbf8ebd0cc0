#pragma once

#include <string>
#include <vector>

#include "dcbn/dcbn.hpp"
#include "discovery/lagged_dag.hpp"

namespace cfrca {

struct CausalPath {
    std::vector<Node> nodes;  // root ... sink(t)
    double likelihood = 0.0;

    bool operator==(const CausalPath&) const = default;
};

// Every directed path from an in-degree-0 node to (sink, 0), in
// lexicographic order of the node sequence.
std::vector<CausalPath> enumerate_paths(const LaggedDag& graph, const std::string& sink);

enum class PathOrder { MostLikelyFirst, LeastLikelyFirst };

// Likelihood of each path at present slot t: P(path nodes = observed |
// every other node = observed), with node (v, l) reading slot t - l. Ties
// keep the lexicographic path order.
std::vector<CausalPath> rank_paths(const Dcbn& model, const CountPanel& panel, std::size_t t,
                                   PathOrder order = PathOrder::MostLikelyFirst);

}  // namespace cfrca
