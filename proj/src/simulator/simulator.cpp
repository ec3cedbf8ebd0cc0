#include "simulator/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "common/io_util.hpp"
#include "common/rng.hpp"
#include "common/stats.hpp"

namespace cfrca {

namespace {

constexpr std::uint64_t kReferenceSeed = 0x6e6f6d696e616c59ULL;
constexpr std::uint64_t kPoifStream = 0x706f6966ULL;
constexpr std::size_t kReferenceSlots = 20000;

struct LaggedParent {
    std::size_t channel;
    std::size_t lag;
};

// Channel couplings of the ground-truth graph, indexed like kChannels.
const std::array<std::array<LaggedParent, 2>, 3> kChannelParents{{
    {{{2, 2}, {1, 1}}},  // X1 <- X3(t-2), X2(t-1)
    {{{0, 1}, {2, 1}}},  // X2 <- X1(t-1), X3(t-1)
    {{{1, 1}, {0, 2}}},  // X3 <- X2(t-1), X1(t-2)
}};

struct Fault {
    std::size_t channel = 0;
    std::size_t poif = 0;
    bool active = false;
};

CountPanel simulate(const SimConfig& config, const Fault& fault) {
    const std::size_t n = config.n_slots;
    CountPanel panel;
    panel.variables = {kChannels[0], kChannels[1], kChannels[2], kAlarm};
    panel.counts.assign(4, std::vector<std::int64_t>(n, 0));
    Rng rng(config.seed);
    const double b = config.baseline_rate;
    for (std::size_t t = 0; t < n; ++t) {
        double excess = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            double rate = b;
            if (t >= 2) {
                double drive = 0.0;
                for (const auto& p : kChannelParents[c]) {
                    drive += static_cast<double>(panel.counts[p.channel][t - p.lag]) - b;
                }
                rate = std::max(kMinChannelRate, b + config.coupling_weight * drive);
            }
            if (fault.active && c == fault.channel && t >= fault.poif) {
                const auto dt = static_cast<double>(t - fault.poif);
                rate += config.fault_ramp * dt * dt;
            }
            panel.counts[c][t] = rng.poisson(rate);
            excess += std::max(0.0, static_cast<double>(panel.counts[c][t]) - config.nominal_threshold);
        }
        panel.counts[3][t] = rng.poisson(kAlarmFloorRate + config.alarm_gain * excess);
    }
    return panel;
}

std::size_t channel_index(const std::string& channel) {
    const auto it = std::find(kChannels.begin(), kChannels.end(), channel);
    if (it == kChannels.end()) throw ValidationError("unknown channel '" + channel + "'");
    return static_cast<std::size_t>(it - kChannels.begin());
}

SimInstance inject_with_quantile(const SimConfig& config, const std::string& channel, std::size_t poif,
                                 double alarm_quantile) {
    config.validate();
    const auto c = channel_index(channel);
    if (poif < 2 || poif + 5 >= config.n_slots) {
        throw ValidationError("poif " + std::to_string(poif) + " outside [2, " +
                              std::to_string(config.n_slots - 5) + ")");
    }
    SimInstance inst;
    inst.panel = simulate(config, Fault{c, poif, true});
    inst.injected_channel = channel;
    inst.true_poif = poif;
    inst.crash_slot = config.n_slots - 1;
    const auto& y = inst.panel.counts[3];
    for (std::size_t t = poif + 1; t + 1 < config.n_slots; ++t) {
        if (static_cast<double>(y[t]) > alarm_quantile && static_cast<double>(y[t + 1]) > alarm_quantile) {
            inst.crash_slot = t;
            break;
        }
    }
    return inst;
}

}  // namespace

void SimConfig::validate() const {
    if (n_slots < 10) throw ValidationError("n_slots must be at least 10");
    if (!(baseline_rate > 0.0) || !std::isfinite(baseline_rate)) {
        throw ValidationError("baseline_rate must be positive");
    }
    for (double v : {coupling_weight, alarm_gain, nominal_threshold, fault_ramp}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError("simulator rates and weights must be finite and non-negative");
        }
    }
}

LaggedDag ground_truth_graph() {
    auto dag = LaggedDag::full_grid({"X1", "X2", "X3", "Y"}, 2);
    dag.add_edge({"X3", 2}, {"X1", 0});
    dag.add_edge({"X2", 1}, {"X1", 0});
    dag.add_edge({"X2", 1}, {"X3", 0});
    dag.add_edge({"X1", 2}, {"X3", 0});
    dag.add_edge({"X1", 1}, {"X2", 0});
    dag.add_edge({"X3", 1}, {"X2", 0});
    dag.add_edge({"X1", 0}, {"Y", 0});
    dag.add_edge({"X2", 0}, {"Y", 0});
    dag.add_edge({"X3", 0}, {"Y", 0});
    return dag;
}

CountPanel generate_normal(const SimConfig& config) {
    config.validate();
    return simulate(config, Fault{});
}

double nominal_alarm_quantile(const SimConfig& config) {
    SimConfig ref = config;
    ref.n_slots = kReferenceSlots;
    ref.seed = kReferenceSeed;
    const auto panel = generate_normal(ref);
    std::vector<double> y(panel.counts[3].begin(), panel.counts[3].end());
    return stats::quantile(std::move(y), 0.999);
}

SimInstance inject_failure(const SimConfig& config, const std::string& channel, std::size_t poif) {
    return inject_with_quantile(config, channel, poif, nominal_alarm_quantile(config));
}

SimInstance generate_instance(const SimConfig& config, std::size_t index, double alarm_quantile) {
    SimConfig local = config;
    local.seed = mix_seed(config.seed, index);
    const std::size_t lo = std::max<std::size_t>(2, config.n_slots / 5);
    const std::size_t hi = std::min(config.n_slots - 6, config.n_slots * 4 / 5);
    if (hi <= lo) throw ValidationError("n_slots too small to place a fault");
    Rng rng(mix_seed(local.seed, kPoifStream));
    const auto poif = lo + static_cast<std::size_t>(rng.uniform_index(hi - lo));
    return inject_with_quantile(local, kChannels[index % kChannels.size()], poif, alarm_quantile);
}

Dataset generate_dataset(const SimConfig& config, std::size_t n_instances) {
    config.validate();
    if (n_instances == 0) throw ValidationError("n_instances must be at least 1");
    Dataset ds;
    ds.config = config;
    const double q = nominal_alarm_quantile(config);
    ds.instances.reserve(n_instances);
    for (std::size_t k = 0; k < n_instances; ++k) ds.instances.push_back(generate_instance(config, k, q));
    return ds;
}

std::string config_to_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    j["n_slots"] = c.n_slots;
    j["baseline_rate"] = c.baseline_rate;
    j["coupling_weight"] = c.coupling_weight;
    j["alarm_gain"] = c.alarm_gain;
    j["nominal_threshold"] = c.nominal_threshold;
    j["fault_ramp"] = c.fault_ramp;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

SimConfig config_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SimConfig c;
        c.n_slots = j.at("n_slots").get<std::size_t>();
        c.baseline_rate = j.at("baseline_rate").get<double>();
        c.coupling_weight = j.at("coupling_weight").get<double>();
        c.alarm_gain = j.at("alarm_gain").get<double>();
        c.nominal_threshold = j.at("nominal_threshold").get<double>();
        c.fault_ramp = j.at("fault_ramp").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("malformed config JSON: ") + ex.what());
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
    io::write_file_atomic(dir / "config.json", config_to_json(dataset.config));
    std::string labels = "instance,injected_channel,true_poif,crash_slot\n";
    for (std::size_t k = 0; k < dataset.instances.size(); ++k) {
        const auto& inst = dataset.instances[k];
        io::write_file_atomic(dir / ("instance_" + std::to_string(k) + ".csv"), panel_to_csv(inst.panel));
        labels += std::to_string(k) + "," + inst.injected_channel + "," + std::to_string(inst.true_poif) + "," +
                  std::to_string(inst.crash_slot) + "\n";
    }
    io::write_file_atomic(dir / "labels.csv", labels);
}

Dataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("dataset directory " + dir.string() + " not found");
    Dataset ds;
    ds.config = config_from_json(io::read_file(dir / "config.json"));
    const auto labels = io::read_file(dir / "labels.csv");
    std::size_t pos = 0, line_no = 0;
    while (pos < labels.size()) {
        auto end = labels.find('\n', pos);
        if (end == std::string::npos) end = labels.size();
        const std::string_view line(labels.data() + pos, end - pos);
        pos = end + 1;
        if (++line_no == 1 || line.empty()) continue;
        const auto f = io::split_csv_line(line);
        if (f.size() != 4) throw ParseError(line_no, "labels.csv expects 4 fields");
        SimInstance inst;
        try {
            const auto k = std::stoul(f[0]);
            if (k != ds.instances.size()) throw ParseError(line_no, "instance indices must be consecutive");
            inst.injected_channel = f[1];
            inst.true_poif = std::stoul(f[2]);
            inst.crash_slot = std::stoul(f[3]);
        } catch (const std::logic_error&) {
            throw ParseError(line_no, "bad number in labels.csv");
        }
        inst.panel = panel_from_csv(io::read_file(dir / ("instance_" + f[0] + ".csv")));
        inst.panel.start_time = 0.0;
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

}  // namespace cfrca
