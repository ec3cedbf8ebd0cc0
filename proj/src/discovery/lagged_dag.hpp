#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace cfrca {

// A variable observed `lag` slots before the present slice.
struct Node {
    std::string var;
    int lag = 0;

    auto operator<=>(const Node&) const = default;
    bool operator==(const Node&) const = default;
};

std::string to_string(const Node& node);  // "X1(t-2)"

using Edge = std::pair<Node, Node>;  // source -> target

// Time-explicit DAG over (variable, lag) nodes. Every edge targets a lag-0
// node, so interslice edges always point forward in time and only the
// lag-0 (intraslice) subgraph can carry cycles; add_edge rejects those.
class LaggedDag {
public:
    LaggedDag() = default;
    LaggedDag(int max_lag, std::vector<Node> nodes);

    // Every variable at every lag 0..max_lag.
    static LaggedDag full_grid(const std::vector<std::string>& variables, int max_lag);

    int max_lag() const { return max_lag_; }
    const std::vector<Node>& nodes() const { return nodes_; }  // sorted by (var, lag)
    std::size_t size() const { return nodes_.size(); }
    std::optional<std::size_t> index_of(const Node& node) const;
    std::size_t require_index(const Node& node) const;
    std::vector<std::string> variables() const;

    void add_edge(const Node& from, const Node& to);
    void remove_edge(const Node& from, const Node& to);
    bool has_edge(const Node& from, const Node& to) const;
    bool has_edge(std::size_t from, std::size_t to) const { return adj_[from][to] != 0; }
    // Whether adding from -> to would be accepted.
    bool can_add_edge(const Node& from, const Node& to) const;

    std::vector<Edge> edges() const;  // sorted lexicographically
    std::size_t edge_count() const;
    std::vector<std::size_t> parents(std::size_t node) const;
    std::vector<std::size_t> children(std::size_t node) const;
    std::size_t in_degree(std::size_t node) const;
    std::size_t out_degree(std::size_t node) const;
    // Deterministic: ties resolved by node order.
    std::vector<std::size_t> topological_order() const;
    bool reaches(std::size_t from, std::size_t to) const;

    bool operator==(const LaggedDag& other) const;

private:
    int max_lag_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::vector<char>> adj_;
};

// Structural Hamming distance: differing cells of the directed adjacency
// matrices. A reversed edge counts 2.
std::size_t shd(const LaggedDag& a, const LaggedDag& b);

nlohmann::json node_to_json(const Node& node);
Node node_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const LaggedDag& dag);
LaggedDag graph_from_json(const nlohmann::json& j);

}  // namespace cfrca
