#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "discovery/lagged_dag.hpp"
#include "event_pipeline/events.hpp"

namespace cfrca {

// Channels X1..X3 exchange messages through the lagged couplings of the
// ground-truth graph; Y is the alarm counting how far each channel runs
// above its nominal threshold.
struct SimConfig {
    std::size_t n_slots = 200;
    double baseline_rate = 10.0;
    double coupling_weight = 0.3;
    double alarm_gain = 0.5;
    double nominal_threshold = 18.0;
    double fault_ramp = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

inline const std::vector<std::string> kChannels{"X1", "X2", "X3"};
inline const std::string kAlarm = "Y";
inline constexpr double kAlarmFloorRate = 0.2;
inline constexpr double kMinChannelRate = 0.1;

struct SimInstance {
    CountPanel panel;  // variables X1, X2, X3, Y
    std::string injected_channel;
    std::size_t true_poif = 0;
    std::size_t crash_slot = 0;

    bool operator==(const SimInstance&) const = default;
};

struct Dataset {
    SimConfig config;
    std::vector<SimInstance> instances;

    bool operator==(const Dataset&) const = default;
};

// Full 4 x 3 node grid carrying the nine edges of the reference system.
LaggedDag ground_truth_graph();

// Nominal operation, no fault.
CountPanel generate_normal(const SimConfig& config);

// Adds fault_ramp * (t - poif)^2 to the injected channel's rate from poif
// on. crash_slot is the first slot after poif that opens a run of two
// alarm counts above the 0.999 quantile of nominal Y (n_slots - 1 if none).
SimInstance inject_failure(const SimConfig& config, const std::string& channel, std::size_t poif);

// The 0.999 quantile of nominal alarm counts, from a 20000-slot reference
// run whose seed is fixed (it depends on the rate parameters only).
double nominal_alarm_quantile(const SimConfig& config);

// Instance k: seed mix_seed(config.seed, k), channel X{k mod 3 + 1}, poif
// uniform on the middle 60% of slots.
Dataset generate_dataset(const SimConfig& config, std::size_t n_instances);
SimInstance generate_instance(const SimConfig& config, std::size_t index, double alarm_quantile);

// dataset/config.json, dataset/instance_<k>.csv, dataset/labels.csv
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(std::string_view text);

}  // namespace cfrca
