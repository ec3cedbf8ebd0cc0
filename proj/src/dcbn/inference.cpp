#include <algorithm>

#include "common/error.hpp"
#include "dcbn/dcbn.hpp"

namespace cfrca {

namespace {

// Sums the product of the factors in `active` over every completion of the
// nodes in `free`, with the rest of `assignment` fixed.
double enumerate(const Dcbn& model, const std::vector<std::size_t>& active, const std::vector<std::size_t>& free,
                 std::vector<int>& assignment) {
    const int K = model.K();
    for (auto f : free) assignment[f] = 0;
    double total = 0.0;
    for (;;) {
        double p = 1.0;
        for (auto i : active) p *= model.conditional(i, assignment);
        total += p;
        std::size_t k = 0;
        while (k < free.size() && ++assignment[free[k]] == K) assignment[free[k++]] = 0;
        if (k == free.size()) break;
    }
    return total;
}

}  // namespace

double query_prob(const Dcbn& model, const Query& q) {
    const auto& graph = model.graph();
    const std::size_t n = graph.size();
    std::vector<int> assignment(n, -1);
    std::vector<char> is_query(n, 0), is_evidence(n, 0);
    auto place = [&](const std::map<Node, int>& states, std::vector<char>& mark) {
        for (const auto& [node, state] : states) {
            const auto i = graph.require_index(node);
            if (state < 0 || state >= model.K()) {
                throw ValidationError("state " + std::to_string(state) + " out of range for " + to_string(node));
            }
            if (is_query[i] || is_evidence[i]) {
                throw ValidationError("node " + to_string(node) + " is in both query and evidence");
            }
            mark[i] = 1;
            assignment[i] = state;
        }
    };
    place(q.query, is_query);
    place(q.evidence, is_evidence);

    // Barren nodes (no query/evidence descendant) sum out to one.
    std::vector<char> relevant(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_query[i] || is_evidence[i]) {
            relevant[i] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        for (auto p : model.parent_index(i)) {
            if (!relevant[p]) {
                relevant[p] = 1;
                stack.push_back(p);
            }
        }
    }

    std::vector<std::size_t> active, hidden, hidden_and_query;
    for (std::size_t i = 0; i < n; ++i) {
        if (!relevant[i]) continue;
        active.push_back(i);
        if (!is_query[i] && !is_evidence[i]) hidden.push_back(i);
        if (!is_evidence[i]) hidden_and_query.push_back(i);
    }

    const double numerator = enumerate(model, active, hidden, assignment);
    if (q.evidence.empty()) return std::clamp(numerator, 0.0, 1.0);
    auto scratch = assignment;
    const double denominator = enumerate(model, active, hidden_and_query, scratch);
    if (!(denominator > 0.0)) throw NumericError("impossible evidence");
    return std::clamp(numerator / denominator, 0.0, 1.0);
}

}  // namespace cfrca
