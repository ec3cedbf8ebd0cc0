#include "diagnosis/paths.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace cfrca {

namespace {

void walk(const LaggedDag& g, std::size_t at, std::size_t sink, std::vector<std::size_t>& trail,
          std::vector<CausalPath>& out) {
    trail.push_back(at);
    if (at == sink) {
        CausalPath p;
        for (auto i : trail) p.nodes.push_back(g.nodes()[i]);
        out.push_back(std::move(p));
    } else {
        for (auto c : g.children(at)) walk(g, c, sink, trail, out);
    }
    trail.pop_back();
}

}  // namespace

std::vector<CausalPath> enumerate_paths(const LaggedDag& graph, const std::string& sink) {
    const auto s = graph.index_of({sink, 0});
    if (!s) throw ValidationError("sink '" + sink + "' has no lag-0 node in the graph");
    std::vector<CausalPath> out;
    std::vector<std::size_t> trail;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (i == *s || graph.in_degree(i) != 0) continue;
        walk(graph, i, *s, trail, out);
    }
    std::sort(out.begin(), out.end(), [](const CausalPath& a, const CausalPath& b) { return a.nodes < b.nodes; });
    return out;
}

std::vector<CausalPath> rank_paths(const Dcbn& model, const CountPanel& panel, std::size_t t, PathOrder order) {
    const auto& graph = model.graph();
    if (t < static_cast<std::size_t>(graph.max_lag()) || t >= panel.n_slots()) {
        throw ValidationError("evaluation slot " + std::to_string(t) + " outside [" +
                              std::to_string(graph.max_lag()) + ", " + std::to_string(panel.n_slots()) + ")");
    }
    const auto states = observe_states(model, panel, t);
    auto paths = enumerate_paths(graph, model.failure_var());
    for (auto& path : paths) {
        Query q;
        for (std::size_t i = 0; i < graph.size(); ++i) {
            const auto& node = graph.nodes()[i];
            const bool on_path = std::find(path.nodes.begin(), path.nodes.end(), node) != path.nodes.end();
            (on_path ? q.query : q.evidence).emplace(node, states[i]);
        }
        path.likelihood = query_prob(model, q);
    }
    std::stable_sort(paths.begin(), paths.end(), [order](const CausalPath& a, const CausalPath& b) {
        return order == PathOrder::MostLikelyFirst ? a.likelihood > b.likelihood : a.likelihood < b.likelihood;
    });
    return paths;
}

}  // namespace cfrca
