#include "diagnosis/counterfactual.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace cfrca {

namespace {

// Cumulative bounds of state s in a CPT row: [C(s - 1), C(s)).
NoiseInterval state_interval(std::span<const double> row, int s) {
    NoiseInterval iv{0.0, 0.0};
    for (int k = 0; k < s; ++k) iv.lo += row[static_cast<std::size_t>(k)];
    iv.hi = s + 1 == static_cast<int>(row.size()) ? 1.0 : iv.lo + row[static_cast<std::size_t>(s)];
    return iv;
}

void check_evidence(const Dcbn& model, std::span<const int> evidence) {
    if (evidence.size() != model.graph().size()) {
        throw ValidationError("counterfactual evidence must cover all " + std::to_string(model.graph().size()) +
                              " nodes");
    }
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (evidence[i] < 0 || evidence[i] >= model.K()) {
            throw ValidationError("invalid state for " + to_string(model.graph().nodes()[i]));
        }
    }
}

struct Propagation {
    const Dcbn& model;
    const std::vector<NoiseInterval>& noise;
    const std::vector<std::size_t>& order;  // descendants, topological
    std::size_t failure;
    std::vector<double>& distribution;

    void run(std::size_t k, std::vector<int>& world, double mass) {
        if (k == order.size()) {
            distribution[static_cast<std::size_t>(world[failure])] += mass;
            return;
        }
        const auto node = order[k];
        const auto& u = noise[node];
        const auto row = model.factors()[node].row(model.row_of(node, world));
        const int saved = world[node];
        for (int s = 0; s < model.K(); ++s) {
            const auto iv = state_interval(row, s);
            const double overlap = std::min(u.hi, iv.hi) - std::max(u.lo, iv.lo);
            if (overlap <= 0.0) continue;
            world[node] = s;
            run(k + 1, world, mass * overlap / u.width());
        }
        world[node] = saved;
    }
};

}  // namespace

int mechanism_state(std::span<const double> cpt_row, double u) {
    double c = 0.0;
    for (std::size_t s = 0; s + 1 < cpt_row.size(); ++s) {
        c += cpt_row[s];
        if (u < c) return static_cast<int>(s);
    }
    return static_cast<int>(cpt_row.size()) - 1;
}

std::vector<NoiseInterval> abduct(const Dcbn& model, std::span<const int> evidence) {
    check_evidence(model, evidence);
    std::vector<NoiseInterval> out(evidence.size());
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        out[i] = state_interval(model.factors()[i].row(model.row_of(i, evidence)), evidence[i]);
    }
    return out;
}

std::vector<NoiseInterval> abduct(const Dcbn& model, const std::map<Node, int>& evidence) {
    const auto& nodes = model.graph().nodes();
    std::vector<int> states(nodes.size(), -1);
    for (const auto& [node, s] : evidence) states[model.graph().require_index(node)] = s;
    std::string missing;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (states[i] < 0) missing += (missing.empty() ? "" : ", ") + to_string(nodes[i]);
    }
    if (!missing.empty()) throw ValidationError("incomplete evidence, missing: " + missing);
    return abduct(model, std::span<const int>(states));
}

RecourseResult counterfactual(const Dcbn& model, std::span<const int> evidence, const Node& node, int alpha_state) {
    const auto& g = model.graph();
    const auto target = g.require_index(node);
    const auto failure = g.require_index({model.failure_var(), 0});
    if (alpha_state < 0 || alpha_state >= model.K()) throw ValidationError("intervention state out of range");

    const auto noise = abduct(model, evidence);
    // Non-ancestors leave the failure node factual; do(failure) pins it.
    std::vector<std::size_t> order;
    for (auto i : g.topological_order()) {
        if (i != target && g.reaches(target, i)) order.push_back(i);
    }
    std::vector<int> world(evidence.begin(), evidence.end());
    world[target] = alpha_state;

    RecourseResult out;
    out.alpha = alpha_state;
    out.alpha_state = alpha_state;
    out.distribution.assign(static_cast<std::size_t>(model.K()), 0.0);
    Propagation{model, noise, order, failure, out.distribution}.run(0, world, 1.0);

    double total = 0.0;
    for (double p : out.distribution) total += p;
    for (auto& p : out.distribution) p /= total;
    out.p_low = out.distribution[0];
    for (std::size_t s = 0; s < out.distribution.size(); ++s) out.mean += static_cast<double>(s) * out.distribution[s];
    double var = 0.0;
    for (std::size_t s = 0; s < out.distribution.size(); ++s) {
        const double d = static_cast<double>(s) - out.mean;
        var += d * d * out.distribution[s];
    }
    out.sd = std::sqrt(std::max(0.0, var));
    return out;
}

RecourseResult counterfactual_count(const Dcbn& model, std::span<const int> evidence, const Node& node,
                                    double alpha_count) {
    auto out = counterfactual(model, evidence, node, model.discretizer().state(node.var, alpha_count));
    out.alpha = alpha_count;
    return out;
}

std::vector<RecourseResult> recourse_sweep(const Dcbn& model, std::span<const int> evidence, const Node& node,
                                           std::span<const double> alphas) {
    if (alphas.empty()) throw ValidationError("recourse sweep needs at least one alpha");
    std::vector<RecourseResult> out;
    out.reserve(alphas.size());
    for (double a : alphas) out.push_back(counterfactual_count(model, evidence, node, a));
    return out;
}

}  // namespace cfrca
