#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dcbn/discretizer.hpp"
#include "discovery/lagged_dag.hpp"
#include "event_pipeline/events.hpp"

namespace cfrca {

// P(node | parents). Rows are joint parent configurations in mixed radix
// (first parent most significant); a root's table has one row (its prior).
struct Cpt {
    Node node;
    std::vector<Node> parents;
    int K = 3;
    std::vector<double> table;  // rows() * K, row-major

    std::size_t rows() const { return table.size() / static_cast<std::size_t>(K); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(table).subspan(r * static_cast<std::size_t>(K), static_cast<std::size_t>(K));
    }
    bool operator==(const Cpt&) const = default;
};

// Dynamic causal Bayesian network with stationary two-slice CPTs.
// factors()[i] belongs to graph().nodes()[i]; lag-0 nodes carry a CPT over
// their graph parents, lagged roots carry a marginal prior.
class Dcbn {
public:
    Dcbn(LaggedDag graph, Discretizer disc, std::string failure_var, std::vector<Cpt> factors);

    const LaggedDag& graph() const { return graph_; }
    const Discretizer& discretizer() const { return disc_; }
    const std::string& failure_var() const { return failure_var_; }
    int K() const { return disc_.K; }
    const std::vector<Cpt>& factors() const { return factors_; }
    const Cpt& factor(const Node& node) const { return factors_[graph_.require_index(node)]; }
    // Parent indices into graph().nodes() for factor i, in table order.
    const std::vector<std::size_t>& parent_index(std::size_t i) const { return parents_[i]; }

    std::size_t row_of(std::size_t node, std::span<const int> assignment) const;
    double conditional(std::size_t node, std::span<const int> assignment) const;
    // Product of all factors for a complete assignment (one state per node).
    double joint(std::span<const int> assignment) const;

    bool operator==(const Dcbn& o) const {
        return graph_ == o.graph_ && disc_ == o.disc_ && failure_var_ == o.failure_var_ && factors_ == o.factors_;
    }

private:
    LaggedDag graph_;
    Discretizer disc_;
    std::string failure_var_;
    std::vector<Cpt> factors_;
    std::vector<std::vector<std::size_t>> parents_;
};

// Discretized state of every graph node at present slot t: node (v, l)
// reads panel slot t - l.
std::vector<int> observe_states(const Dcbn& model, const CountPanel& panel, std::size_t t);

// Maximum-likelihood CPTs with additive smoothing, pooled over every slot
// t >= max_lag of every panel.
Dcbn fit_cpts(const LaggedDag& graph, std::span<const CountPanel> panels, const Discretizer& disc,
              double smoothing, const std::string& failure_var);

struct Query {
    std::map<Node, int> query;
    std::map<Node, int> evidence;
};

// P(query | evidence) by exact enumeration over the ancestral closure of
// the query and evidence nodes. Cost is O(K^f) for f free ancestors.
double query_prob(const Dcbn& model, const Query& q);

struct ProbSeries {
    std::size_t start_slot = 0;
    std::vector<double> values;
};

// P_F(t) = P(failure = top state | failure parents observed at t), for
// t = max_lag .. n_slots - 1.
ProbSeries predict_failure_prob(const Dcbn& model, const CountPanel& panel);

// RMSE between the predicted series and the failure counts min-max
// normalized over the same slots.
double prediction_rmse(const ProbSeries& predicted, const CountPanel& panel, const std::string& failure_var);

nlohmann::json model_to_json(const Dcbn& model);
Dcbn model_from_json(const nlohmann::json& j);
void save_model(const Dcbn& model, const std::filesystem::path& path);
Dcbn load_model(const std::filesystem::path& path);

}  // namespace cfrca
