#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dcbn/dcbn.hpp"
#include "diagnosis/counterfactual.hpp"
#include "diagnosis/paths.hpp"
#include "diagnosis/poif.hpp"

namespace cfrca {

inline constexpr const char* kStatusDetected = "incipient failure detected";
inline constexpr const char* kStatusNotDetected = "no incipient failure detected";

struct DiagnoseOptions {
    double theta = 0.1;
    // Least likely first treats the most irregular path as the explanation.
    PathOrder order = PathOrder::LeastLikelyFirst;
    // Counts to sweep for recourse. When empty, alpha_steps evenly spaced
    // counts over [0, max count of the recourse variable up to T + 1].
    std::vector<double> alpha_grid;
    std::size_t alpha_steps = 21;
};

struct DiagnosisReport {
    std::string status;
    PoifResult poif;
    ProbSeries failure_prob;
    std::size_t evaluation_slot = 0;  // T + 1
    PathOrder order = PathOrder::LeastLikelyFirst;
    std::vector<CausalPath> paths;    // in `order`
    std::optional<Node> recourse_node;
    std::vector<RecourseResult> recourse;
};

// The first lag-0 non-sink node on the path, else its root.
Node recourse_target(const CausalPath& path, const std::string& sink);

// P_F series -> PoIF -> path ranking at T + 1 -> recourse sweep on the top
// path's present-slice channel.
DiagnosisReport diagnose(const Dcbn& model, const CountPanel& panel, const DiagnoseOptions& options = {});

nlohmann::json report_to_json(const DiagnosisReport& report);
DiagnosisReport report_from_json(const nlohmann::json& j);

std::string failure_prob_csv(const ProbSeries& series);
std::string recourse_csv(const std::vector<RecourseResult>& sweep);

}  // namespace cfrca
