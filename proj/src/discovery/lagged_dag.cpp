#include "discovery/lagged_dag.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <queue>

#include "common/error.hpp"

namespace cfrca {

std::string to_string(const Node& node) {
    if (node.lag == 0) return node.var + "(t)";
    return node.var + "(t-" + std::to_string(node.lag) + ")";
}

LaggedDag::LaggedDag(int max_lag, std::vector<Node> nodes) : max_lag_(max_lag), nodes_(std::move(nodes)) {
    if (max_lag_ < 0) throw ValidationError("max_lag must be non-negative");
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
        throw ValidationError("duplicate node in graph");
    }
    for (const auto& n : nodes_) {
        if (n.var.empty()) throw ValidationError("node with empty variable name");
        if (n.lag < 0 || n.lag > max_lag_) throw ValidationError("node " + to_string(n) + " outside lag range");
    }
    adj_.assign(nodes_.size(), std::vector<char>(nodes_.size(), 0));
}

LaggedDag LaggedDag::full_grid(const std::vector<std::string>& variables, int max_lag) {
    std::vector<Node> nodes;
    for (const auto& v : variables) {
        for (int lag = 0; lag <= max_lag; ++lag) nodes.push_back({v, lag});
    }
    return LaggedDag(max_lag, std::move(nodes));
}

std::optional<std::size_t> LaggedDag::index_of(const Node& node) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end() || *it != node) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t LaggedDag::require_index(const Node& node) const {
    const auto idx = index_of(node);
    if (!idx) throw ValidationError("node " + to_string(node) + " not in graph");
    return *idx;
}

std::vector<std::string> LaggedDag::variables() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) {
        if (out.empty() || out.back() != n.var) out.push_back(n.var);
    }
    return out;
}

bool LaggedDag::can_add_edge(const Node& from, const Node& to) const {
    const auto f = index_of(from);
    const auto t = index_of(to);
    if (!f || !t || *f == *t || to.lag != 0) return false;
    if (adj_[*f][*t]) return true;
    return !reaches(*t, *f);
}

void LaggedDag::add_edge(const Node& from, const Node& to) {
    const auto f = require_index(from);
    const auto t = require_index(to);
    if (f == t) throw ValidationError("self loop on " + to_string(from));
    if (to.lag != 0) throw ValidationError("edge target " + to_string(to) + " is not in the present slice");
    if (reaches(t, f)) {
        throw ValidationError("edge " + to_string(from) + " -> " + to_string(to) + " would create a cycle");
    }
    adj_[f][t] = 1;
}

void LaggedDag::remove_edge(const Node& from, const Node& to) {
    adj_[require_index(from)][require_index(to)] = 0;
}

bool LaggedDag::has_edge(const Node& from, const Node& to) const {
    const auto f = index_of(from);
    const auto t = index_of(to);
    return f && t && adj_[*f][*t];
}

std::vector<Edge> LaggedDag::edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (adj_[i][j]) out.emplace_back(nodes_[i], nodes_[j]);
        }
    }
    return out;  // row-major over sorted nodes is already lexicographic
}

std::size_t LaggedDag::edge_count() const {
    std::size_t n = 0;
    for (const auto& row : adj_) n += static_cast<std::size_t>(std::count(row.begin(), row.end(), 1));
    return n;
}

std::vector<std::size_t> LaggedDag::parents(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (adj_[i][node]) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> LaggedDag::children(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (adj_[node][j]) out.push_back(j);
    }
    return out;
}

std::size_t LaggedDag::in_degree(std::size_t node) const { return parents(node).size(); }
std::size_t LaggedDag::out_degree(std::size_t node) const { return children(node).size(); }

std::vector<std::size_t> LaggedDag::topological_order() const {
    const std::size_t n = nodes_.size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) indeg[j] += adj_[i][j] ? 1 : 0;
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const auto i = ready.top();
        ready.pop();
        order.push_back(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (adj_[i][j] && --indeg[j] == 0) ready.push(j);
        }
    }
    if (order.size() != n) throw ValidationError("graph contains a cycle");
    return order;
}

bool LaggedDag::reaches(std::size_t from, std::size_t to) const {
    if (from == to) return true;
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (!adj_[i][j] || seen[j]) continue;
            if (j == to) return true;
            seen[j] = 1;
            stack.push_back(j);
        }
    }
    return false;
}

bool LaggedDag::operator==(const LaggedDag& other) const {
    return max_lag_ == other.max_lag_ && nodes_ == other.nodes_ && adj_ == other.adj_;
}

std::size_t shd(const LaggedDag& a, const LaggedDag& b) {
    if (a.nodes() != b.nodes()) throw ValidationError("shd requires graphs over the same node set");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a.has_edge(i, j) != b.has_edge(i, j)) ++d;
        }
    }
    return d;
}

nlohmann::json node_to_json(const Node& node) {
    return {{"var", node.var}, {"lag", node.lag}};
}

Node node_from_json(const nlohmann::json& j) {
    return Node{j.at("var").get<std::string>(), j.at("lag").get<int>()};
}

nlohmann::json graph_to_json(const LaggedDag& dag) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : dag.nodes()) nodes.push_back(node_to_json(n));
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [from, to] : dag.edges()) {
        edges.push_back(nlohmann::json::array({node_to_json(from), node_to_json(to)}));
    }
    return {{"max_lag", dag.max_lag()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

LaggedDag graph_from_json(const nlohmann::json& j) {
    try {
        std::vector<Node> nodes;
        for (const auto& n : j.at("nodes")) nodes.push_back(node_from_json(n));
        LaggedDag dag(j.at("max_lag").get<int>(), std::move(nodes));
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ValidationError("graph edge must be a [from, to] pair");
            dag.add_edge(node_from_json(e[0]), node_from_json(e[1]));
        }
        return dag;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("malformed graph JSON: ") + ex.what());
    }
}

}  // namespace cfrca
