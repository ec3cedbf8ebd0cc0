#include "diagnosis/diagnose.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/io_util.hpp"

namespace cfrca {

Node recourse_target(const CausalPath& path, const std::string& sink) {
    for (const auto& n : path.nodes) {
        if (n.lag == 0 && n.var != sink) return n;
    }
    return path.nodes.front();
}

DiagnosisReport diagnose(const Dcbn& model, const CountPanel& panel, const DiagnoseOptions& options) {
    DiagnosisReport report;
    report.failure_prob = predict_failure_prob(model, panel);
    report.poif = detect_poif(report.failure_prob, options.theta);
    if (!report.poif.detected) {
        report.status = kStatusNotDetected;
        return report;
    }
    report.status = kStatusDetected;
    report.evaluation_slot = report.poif.T + 1;
    report.order = options.order;
    report.paths = rank_paths(model, panel, report.evaluation_slot, options.order);
    if (report.paths.empty()) return report;

    const auto target = recourse_target(report.paths.front(), model.failure_var());
    report.recourse_node = target;
    auto grid = options.alpha_grid;
    if (grid.empty()) {
        if (options.alpha_steps == 0) throw ValidationError("alpha_steps must be at least 1");
        const auto series = panel.series(target.var).first(report.evaluation_slot + 1);
        const double hi = static_cast<double>(*std::max_element(series.begin(), series.end()));
        for (std::size_t k = 0; k < options.alpha_steps; ++k) {
            grid.push_back(options.alpha_steps == 1
                               ? 0.0
                               : hi * static_cast<double>(k) / static_cast<double>(options.alpha_steps - 1));
        }
    }
    const auto evidence = observe_states(model, panel, report.evaluation_slot);
    report.recourse = recourse_sweep(model, evidence, target, grid);
    return report;
}

nlohmann::json report_to_json(const DiagnosisReport& report) {
    using nlohmann::json;
    json poif = {{"detected", report.poif.detected}, {"theta", report.poif.theta}};
    poif["T"] = report.poif.detected ? json(report.poif.T) : json(nullptr);
    json paths = json::array();
    for (const auto& p : report.paths) {
        json nodes = json::array();
        for (const auto& n : p.nodes) nodes.push_back(node_to_json(n));
        paths.push_back({{"nodes", std::move(nodes)}, {"likelihood", p.likelihood}});
    }
    json recourse = json::array();
    for (const auto& r : report.recourse) {
        recourse.push_back({{"alpha", r.alpha},
                            {"state", r.alpha_state},
                            {"mean", r.mean},
                            {"sd", r.sd},
                            {"p_low", r.p_low},
                            {"distribution", r.distribution}});
    }
    json out = {{"status", report.status}, {"poif", std::move(poif)}, {"paths", std::move(paths)},
                {"recourse", std::move(recourse)}};
    out["order"] = report.order == PathOrder::LeastLikelyFirst ? "least_likely_first" : "most_likely_first";
    out["evaluation_slot"] = report.poif.detected ? json(report.evaluation_slot) : json(nullptr);
    out["recourse_node"] = report.recourse_node ? node_to_json(*report.recourse_node) : json(nullptr);
    return out;
}

DiagnosisReport report_from_json(const nlohmann::json& j) {
    try {
        DiagnosisReport r;
        r.status = j.at("status").get<std::string>();
        const auto& poif = j.at("poif");
        r.poif.detected = poif.at("detected").get<bool>();
        r.poif.theta = poif.at("theta").get<double>();
        if (!poif.at("T").is_null()) r.poif.T = poif.at("T").get<std::size_t>();
        const auto order = j.value("order", std::string("least_likely_first"));
        if (order == "most_likely_first") {
            r.order = PathOrder::MostLikelyFirst;
        } else if (order != "least_likely_first") {
            throw ValidationError("unknown path order '" + order + "'");
        }
        if (!j.at("evaluation_slot").is_null()) r.evaluation_slot = j.at("evaluation_slot").get<std::size_t>();
        for (const auto& p : j.at("paths")) {
            CausalPath path;
            for (const auto& n : p.at("nodes")) path.nodes.push_back(node_from_json(n));
            path.likelihood = p.at("likelihood").get<double>();
            r.paths.push_back(std::move(path));
        }
        if (!j.at("recourse_node").is_null()) r.recourse_node = node_from_json(j.at("recourse_node"));
        for (const auto& e : j.at("recourse")) {
            RecourseResult rr;
            rr.alpha = e.at("alpha").get<double>();
            rr.alpha_state = e.at("state").get<int>();
            rr.mean = e.at("mean").get<double>();
            rr.sd = e.at("sd").get<double>();
            rr.p_low = e.at("p_low").get<double>();
            rr.distribution = e.at("distribution").get<std::vector<double>>();
            r.recourse.push_back(std::move(rr));
        }
        return r;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("malformed report JSON: ") + ex.what());
    }
}

std::string failure_prob_csv(const ProbSeries& series) {
    std::string out = "slot,p_f\n";
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        out += std::to_string(series.start_slot + k) + "," + io::format_double(series.values[k]) + "\n";
    }
    return out;
}

std::string recourse_csv(const std::vector<RecourseResult>& sweep) {
    std::string out = "alpha,mean,sd,p_low\n";
    for (const auto& r : sweep) {
        out += io::format_double(r.alpha) + "," + io::format_double(r.mean) + "," + io::format_double(r.sd) + "," +
               io::format_double(r.p_low) + "\n";
    }
    return out;
}

}  // namespace cfrca
