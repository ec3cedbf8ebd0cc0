#include "pipeline/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "discovery/lagged_data.hpp"
#include "discovery/pc_stable.hpp"

namespace cfrca {

namespace {

// Nominal comparison runs draw from a stream disjoint from instance seeds.
constexpr std::uint64_t kNominalStream = 0x6e6f6d696e616cULL;

}  // namespace

CountPanel training_window(const SimInstance& instance) {
    return window_to_failure(instance.panel, instance.crash_slot, instance.crash_slot + 1);
}

LaggedDag discover_graph(std::span<const CountPanel> panels, int max_lag, double alpha) {
    PcOptions opts;
    opts.alpha = alpha;
    opts.sink = kAlarm;
    return pc_stable(lag_augment_pooled(panels, max_lag), opts).dag;
}

TrainResult train_model(const Dataset& dataset, const LaggedDag& graph, const TrainOptions& options) {
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw ValidationError("train fraction must lie in (0, 1)");
    }
    const std::size_t n = dataset.instances.size();
    const auto n_train = static_cast<std::size_t>(std::floor(options.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) throw ValidationError("split leaves an empty train or test set");

    for (const auto& var : graph.variables()) {
        if (std::find(dataset.instances.front().panel.variables.begin(),
                      dataset.instances.front().panel.variables.end(),
                      var) == dataset.instances.front().panel.variables.end()) {
            throw ValidationError("graph variable '" + var + "' is not in the dataset");
        }
    }

    TrainResult result;
    Dataset train_set;
    train_set.config = dataset.config;
    std::vector<CountPanel> windows;
    for (std::size_t k = 0; k < n_train; ++k) {
        result.train_indices.push_back(k);
        train_set.instances.push_back(dataset.instances[k]);
        windows.push_back(training_window(dataset.instances[k]));
    }
    const auto disc = fit_discretizer(train_set, options.K, options.binning);
    result.model.emplace(fit_cpts(graph, windows, disc, options.smoothing, kAlarm));

    double total = 0.0;
    for (std::size_t k = n_train; k < n; ++k) {
        result.test_indices.push_back(k);
        const auto w = training_window(dataset.instances[k]);
        const double r = prediction_rmse(predict_failure_prob(*result.model, w), w, kAlarm);
        result.test_rmse.push_back(r);
        total += r;
    }
    result.rmse = total / static_cast<double>(result.test_rmse.size());
    return result;
}

nlohmann::json split_to_json(const TrainResult& result) {
    std::vector<std::size_t> overlap;
    std::set_intersection(result.train_indices.begin(), result.train_indices.end(), result.test_indices.begin(),
                          result.test_indices.end(), std::back_inserter(overlap));
    return {{"train", result.train_indices},
            {"test", result.test_indices},
            {"disjoint", overlap.empty()},
            {"test_rmse", result.test_rmse},
            {"rmse", result.rmse}};
}

double recourse_p_low(const Dcbn& model, const CountPanel& panel, const std::string& channel, std::size_t poif,
                      std::size_t t) {
    if (poif == 0) throw ValidationError("no pre-fault history to take a median from");
    const auto series = panel.series(channel);
    std::vector<double> pre(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(poif));
    std::sort(pre.begin(), pre.end());
    const double median = pre.size() % 2 ? pre[pre.size() / 2] : 0.5 * (pre[pre.size() / 2 - 1] + pre[pre.size() / 2]);
    const auto evidence = observe_states(model, panel, t);
    return counterfactual_count(model, evidence, {channel, 0}, median).p_low;
}

ExperimentSummary run_experiment(const SimConfig& config, const ExperimentOptions& options) {
    if (options.n_instances < 2) throw ValidationError("experiment needs at least 2 instances");
    ExperimentSummary s;
    const auto dataset = generate_dataset(config, options.n_instances);
    const auto truth = ground_truth_graph();

    std::vector<CountPanel> panels;
    for (const auto& inst : dataset.instances) panels.push_back(training_window(inst));
    for (double alpha : options.alphas) {
        s.discovery.push_back({alpha, shd(discover_graph(panels, options.max_lag, alpha), truth)});
    }

    const auto trained = train_model(dataset, truth, options.train);
    const auto& model = *trained.model;
    s.rmse = trained.rmse;
    s.test_instances = trained.test_indices.size();

    double p_low_total = 0.0;
    for (auto k : trained.test_indices) {
        const auto& inst = dataset.instances[k];
        const auto w = training_window(inst);
        const auto poif = detect_poif(predict_failure_prob(model, w), options.diagnose.theta);
        std::size_t t = inst.true_poif;
        if (poif.detected) {
            ++s.detected;
            t = poif.T;
            const auto diff = static_cast<long long>(poif.T) - static_cast<long long>(inst.true_poif);
            if (std::llabs(diff) <= 2) ++s.poif_within_2;
            if (poif.T + 1 < w.n_slots()) {
                const auto paths = rank_paths(model, w, poif.T + 1, options.diagnose.order);
                if (!paths.empty() && recourse_target(paths.front(), kAlarm).var == inst.injected_channel) {
                    ++s.top_path_hits;
                }
            }
        }
        t = std::max<std::size_t>(t, static_cast<std::size_t>(model.graph().max_lag()));
        t = std::min(t, w.n_slots() - 1);
        p_low_total += recourse_p_low(model, w, inst.injected_channel, inst.true_poif, t);
    }
    s.mean_p_low = p_low_total / static_cast<double>(trained.test_indices.size());

    for (std::size_t k = 0; k < options.n_nominal; ++k) {
        SimConfig nominal = config;
        nominal.seed = mix_seed(mix_seed(config.seed, kNominalStream), k);
        const auto panel = generate_normal(nominal);
        if (detect_poif(predict_failure_prob(model, panel), options.diagnose.theta).detected) ++s.nominal_detections;
        ++s.nominal_runs;
    }
    return s;
}

nlohmann::json summary_to_json(const ExperimentSummary& s) {
    nlohmann::json disc = nlohmann::json::array();
    for (const auto& d : s.discovery) disc.push_back({{"alpha", d.alpha}, {"shd", d.shd}});
    return {{"discovery", std::move(disc)},
            {"rmse", s.rmse},
            {"test_instances", s.test_instances},
            {"detected", s.detected},
            {"poif_within_2", s.poif_within_2},
            {"top_path_hits", s.top_path_hits},
            {"mean_p_low", s.mean_p_low},
            {"nominal_runs", s.nominal_runs},
            {"nominal_detections", s.nominal_detections}};
}

}  // namespace cfrca
