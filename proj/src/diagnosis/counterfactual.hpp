#pragma once

#include <map>
#include <span>
#include <vector>

#include "dcbn/dcbn.hpp"

namespace cfrca {

// Posterior of a node's uniform noise U given its observed state x and
// observed parents: Uniform on [C(x - 1 | pa), C(x | pa)), where C is the
// cumulative CPT row. Under the monotone inverse-CDF mechanism
// X = min{x : C(x | pa) > U} this interval is exactly the set of U values
// that reproduce x.
struct NoiseInterval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

// Evidence must assign a state to every node in the model.
std::vector<NoiseInterval> abduct(const Dcbn& model, std::span<const int> evidence);
std::vector<NoiseInterval> abduct(const Dcbn& model, const std::map<Node, int>& evidence);

// Inverse-CDF mechanism: the state whose cumulative interval contains u.
int mechanism_state(std::span<const double> cpt_row, double u);

struct RecourseResult {
    double alpha = 0.0;  // intervention value as given (count or state)
    int alpha_state = 0;
    std::vector<double> distribution;  // over failure states
    double p_low = 0.0;
    double mean = 0.0;  // of the failure state index (L = 0, ...)
    double sd = 0.0;

    bool operator==(const RecourseResult&) const = default;
};

// Abduction-action-prediction for do(node = alpha_state). Descendants of
// the intervened node are propagated in topological order; each one's
// counterfactual state measure is the overlap of its noise interval with
// the CPT row selected by its counterfactual parents, enumerated exactly
// over the joint of all descendants.
RecourseResult counterfactual(const Dcbn& model, std::span<const int> evidence, const Node& node, int alpha_state);

// The same with a raw count, discretized with the model's discretizer.
RecourseResult counterfactual_count(const Dcbn& model, std::span<const int> evidence, const Node& node,
                                    double alpha_count);

// One counterfactual per count in `alphas`.
std::vector<RecourseResult> recourse_sweep(const Dcbn& model, std::span<const int> evidence, const Node& node,
                                           std::span<const double> alphas);

}  // namespace cfrca
