#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dcbn/dcbn.hpp"
#include "dcbn/discretizer.hpp"
#include "diagnosis/diagnose.hpp"
#include "discovery/lagged_dag.hpp"
#include "simulator/simulator.hpp"

namespace cfrca {

// Slots [0, crash_slot] of an instance: the history the model may see.
CountPanel training_window(const SimInstance& instance);

LaggedDag discover_graph(std::span<const CountPanel> panels, int max_lag, double alpha);

struct TrainOptions {
    int K = 3;
    double smoothing = 1.0;
    double train_fraction = 0.8;
    Binning binning = Binning::Envelope;
};

struct TrainResult {
    std::optional<Dcbn> model;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::vector<double> test_rmse;  // per test instance
    double rmse = 0.0;              // mean over test instances
};

// Index split: the first floor(fraction * n) instances train, the rest test.
TrainResult train_model(const Dataset& dataset, const LaggedDag& graph, const TrainOptions& options = {});

nlohmann::json split_to_json(const TrainResult& result);

// P(failure state L) at slot t after setting `channel` to its median count
// over [0, poif).
double recourse_p_low(const Dcbn& model, const CountPanel& panel, const std::string& channel, std::size_t poif,
                      std::size_t t);

struct ExperimentOptions {
    std::size_t n_instances = 100;
    std::size_t n_nominal = 50;
    std::vector<double> alphas{0.01, 0.03, 0.05};
    int max_lag = 2;
    TrainOptions train;
    DiagnoseOptions diagnose;
};

struct ExperimentSummary {
    struct Shd {
        double alpha = 0.0;
        std::size_t shd = 0;
    };
    std::vector<Shd> discovery;
    double rmse = 0.0;
    std::size_t test_instances = 0;
    std::size_t detected = 0;
    std::size_t poif_within_2 = 0;
    std::size_t top_path_hits = 0;
    double mean_p_low = 0.0;
    std::size_t nominal_runs = 0;
    std::size_t nominal_detections = 0;
};

// Simulate -> discover -> train on the ground truth -> diagnose held-out
// instances and nominal runs.
ExperimentSummary run_experiment(const SimConfig& config, const ExperimentOptions& options = {});

nlohmann::json summary_to_json(const ExperimentSummary& summary);

}  // namespace cfrca
