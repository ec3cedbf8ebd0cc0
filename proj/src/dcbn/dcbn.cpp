#include "dcbn/dcbn.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace cfrca {

Dcbn::Dcbn(LaggedDag graph, Discretizer disc, std::string failure_var, std::vector<Cpt> factors)
    : graph_(std::move(graph)), disc_(std::move(disc)), failure_var_(std::move(failure_var)),
      factors_(std::move(factors)) {
    disc_.validate();
    const auto& nodes = graph_.nodes();
    if (!graph_.index_of({failure_var_, 0})) {
        throw ValidationError("failure variable '" + failure_var_ + "' has no lag-0 node");
    }
    if (factors_.size() != nodes.size()) throw ValidationError("model needs one table per graph node");
    parents_.resize(nodes.size());
    const auto K = static_cast<std::size_t>(disc_.K);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& f = factors_[i];
        disc_.index_of(nodes[i].var);
        if (f.node != nodes[i]) throw ValidationError("table order does not match graph node order");
        if (f.K != disc_.K) throw ValidationError("table for " + to_string(f.node) + " has the wrong K");
        parents_[i] = graph_.parents(i);
        std::vector<Node> expected;
        for (auto p : parents_[i]) expected.push_back(nodes[p]);
        if (f.parents != expected) {
            throw ValidationError("parents of " + to_string(f.node) + " do not match the graph");
        }
        std::size_t rows = 1;
        for (std::size_t p = 0; p < expected.size(); ++p) rows *= K;
        if (f.table.size() != rows * K) throw ValidationError("table for " + to_string(f.node) + " has wrong size");
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (double v : f.row(r)) {
                if (!(v > 0.0) || !std::isfinite(v)) {
                    throw ValidationError("table for " + to_string(f.node) + " has a non-positive entry");
                }
                sum += v;
            }
            if (std::fabs(sum - 1.0) > 1e-9) {
                throw ValidationError("row " + std::to_string(r) + " of " + to_string(f.node) + " does not sum to 1");
            }
        }
    }
}

std::size_t Dcbn::row_of(std::size_t node, std::span<const int> assignment) const {
    std::size_t row = 0;
    for (auto p : parents_[node]) row = row * static_cast<std::size_t>(disc_.K) + static_cast<std::size_t>(assignment[p]);
    return row;
}

double Dcbn::conditional(std::size_t node, std::span<const int> assignment) const {
    return factors_[node].row(row_of(node, assignment))[static_cast<std::size_t>(assignment[node])];
}

double Dcbn::joint(std::span<const int> assignment) const {
    if (assignment.size() != factors_.size()) throw ValidationError("joint needs one state per node");
    double p = 1.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) p *= conditional(i, assignment);
    return p;
}

std::vector<int> observe_states(const Dcbn& model, const CountPanel& panel, std::size_t t) {
    const auto& nodes = model.graph().nodes();
    std::vector<int> states(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto lag = static_cast<std::size_t>(nodes[i].lag);
        if (lag > t || t >= panel.n_slots()) {
            throw ValidationError("slot " + std::to_string(t) + " cannot be observed at " + to_string(nodes[i]));
        }
        const auto series = panel.series(nodes[i].var);
        states[i] = model.discretizer().state(nodes[i].var, static_cast<double>(series[t - lag]));
    }
    return states;
}

Dcbn fit_cpts(const LaggedDag& graph, std::span<const CountPanel> panels, const Discretizer& disc,
              double smoothing, const std::string& failure_var) {
    if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
        throw ValidationError("smoothing must be positive; zero cells would break abduction");
    }
    disc.validate();
    const auto& nodes = graph.nodes();
    const auto K = static_cast<std::size_t>(disc.K);
    for (const auto& var : graph.variables()) {
        disc.index_of(var);
        for (const auto& p : panels) {
            if (!p.index_of(var)) throw ValidationError("panel lacks graph variable '" + var + "'");
        }
    }

    std::vector<std::vector<std::size_t>> parents(nodes.size());
    std::vector<std::vector<double>> counts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        parents[i] = graph.parents(i);
        std::size_t rows = 1;
        for (std::size_t p = 0; p < parents[i].size(); ++p) rows *= K;
        counts[i].assign(rows * K, 0.0);
    }

    const auto max_lag = static_cast<std::size_t>(graph.max_lag());
    std::vector<std::size_t> var_of(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) var_of[i] = disc.index_of(nodes[i].var);
    std::vector<int> states(nodes.size());
    for (const auto& panel : panels) {
        std::vector<std::span<const std::int64_t>> series;
        for (const auto& n : nodes) series.push_back(panel.series(n.var));
        for (std::size_t t = max_lag; t < panel.n_slots(); ++t) {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const auto lag = static_cast<std::size_t>(nodes[i].lag);
                states[i] = disc.state(var_of[i], static_cast<double>(series[i][t - lag]));
            }
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                std::size_t row = 0;
                for (auto p : parents[i]) row = row * K + static_cast<std::size_t>(states[p]);
                counts[i][row * K + static_cast<std::size_t>(states[i])] += 1.0;
            }
        }
    }

    std::vector<Cpt> factors;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Cpt cpt;
        cpt.node = nodes[i];
        for (auto p : parents[i]) cpt.parents.push_back(nodes[p]);
        cpt.K = disc.K;
        cpt.table.resize(counts[i].size());
        for (std::size_t r = 0; r < counts[i].size() / K; ++r) {
            double total = 0.0;
            for (std::size_t s = 0; s < K; ++s) total += counts[i][r * K + s] + smoothing;
            for (std::size_t s = 0; s < K; ++s) cpt.table[r * K + s] = (counts[i][r * K + s] + smoothing) / total;
        }
        factors.push_back(std::move(cpt));
    }
    return Dcbn(graph, disc, failure_var, std::move(factors));
}

ProbSeries predict_failure_prob(const Dcbn& model, const CountPanel& panel) {
    const auto& graph = model.graph();
    const auto max_lag = static_cast<std::size_t>(graph.max_lag());
    if (panel.n_slots() < max_lag + 1) {
        throw ValidationError("panel needs at least " + std::to_string(max_lag + 1) + " slots");
    }
    const auto f = graph.require_index({model.failure_var(), 0});
    const auto& nodes = graph.nodes();
    const auto& pa = model.parent_index(f);
    std::vector<std::span<const std::int64_t>> series;
    for (auto p : pa) series.push_back(panel.series(nodes[p].var));

    ProbSeries out;
    out.start_slot = max_lag;
    const auto K = static_cast<std::size_t>(model.K());
    const auto& cpt = model.factors()[f];
    for (std::size_t t = max_lag; t < panel.n_slots(); ++t) {
        std::size_t row = 0;
        for (std::size_t k = 0; k < pa.size(); ++k) {
            const auto& n = nodes[pa[k]];
            const auto value = static_cast<double>(series[k][t - static_cast<std::size_t>(n.lag)]);
            row = row * K + static_cast<std::size_t>(model.discretizer().state(n.var, value));
        }
        out.values.push_back(cpt.row(row)[K - 1]);
    }
    return out;
}

double prediction_rmse(const ProbSeries& predicted, const CountPanel& panel, const std::string& failure_var) {
    const auto actual = panel.series(failure_var);
    if (predicted.values.empty()) throw ValidationError("empty prediction");
    if (predicted.start_slot + predicted.values.size() > actual.size()) {
        throw ValidationError("prediction is not aligned with the panel");
    }
    const auto window = actual.subspan(predicted.start_slot, predicted.values.size());
    const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
    if (*lo == *hi) {
        throw ValidationError("cannot normalize '" + failure_var + "': constant over the prediction window");
    }
    const double range = static_cast<double>(*hi - *lo);
    double ss = 0.0;
    for (std::size_t k = 0; k < window.size(); ++k) {
        const double a = static_cast<double>(window[k] - *lo) / range;
        const double d = predicted.values[k] - a;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(window.size()));
}

}  // namespace cfrca
