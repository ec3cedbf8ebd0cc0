#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "common/io_util.hpp"
#include "discovery/ci_tests.hpp"
#include "discovery/lagged_data.hpp"
#include "simulator/simulator.hpp"

using namespace cfrca;
namespace fs = std::filesystem;

TEST_CASE("ground truth graph has nine edges into a sink alarm") {
    const auto g = ground_truth_graph();
    CHECK(g.edge_count() == 9);
    const auto y = g.require_index({"Y", 0});
    CHECK(g.in_degree(y) == 3);
    CHECK(g.out_degree(y) == 0);
    for (const auto& [from, to] : g.edges()) {
        CHECK(to.lag == 0);
        CHECK(from.lag >= to.lag);
    }
    CHECK(g.topological_order().size() == g.size());
}

TEST_CASE("equal seeds give identical panels") {
    SimConfig c;
    c.seed = 42;
    CHECK(generate_normal(c) == generate_normal(c));
    CHECK(inject_failure(c, "X2", 80) == inject_failure(c, "X2", 80));
    SimConfig d = c;
    d.seed = 43;
    CHECK_FALSE(generate_normal(c) == generate_normal(d));
}

TEST_CASE("zero alarm gain leaves the alarm at its floor rate") {
    SimConfig c;
    c.alarm_gain = 0.0;
    c.n_slots = 10000;
    c.seed = 5;
    const auto y = generate_normal(c).series("Y");
    double sum = 0.0;
    for (auto v : y) sum += static_cast<double>(v);
    const double mean = sum / static_cast<double>(y.size());
    const double se = std::sqrt(kAlarmFloorRate / static_cast<double>(y.size()));
    CHECK(std::fabs(mean - kAlarmFloorRate) < 3.0 * se);
}

TEST_CASE("zero coupling makes lagged channels independent") {
    int accepted = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        SimConfig c;
        c.coupling_weight = 0.0;
        c.n_slots = 10000;
        c.seed = 100 + s;
        const auto m = lag_augment(generate_normal(c), 1);
        const std::size_t i = m.column_of({"X1", 0});
        const std::size_t j = m.column_of({"X2", 1});
        if (fisher_z_test(m, i, j, {}).p_value > 0.01) ++accepted;
    }
    CHECK(accepted >= 95);
}

TEST_CASE("zero ramp injects nothing and never crashes early") {
    SimConfig c;
    c.fault_ramp = 0.0;
    c.seed = 9;
    const auto inst = inject_failure(c, "X1", 100);
    CHECK(inst.crash_slot == c.n_slots - 1);
    CHECK(inst.panel == generate_normal(c));
}

TEST_CASE("a fault on X1 propagates to X2") {
    // One-sided paired t statistic of post-minus-pre X2 means.
    std::vector<double> diff;
    for (std::uint64_t s = 0; s < 100; ++s) {
        SimConfig c;
        c.seed = 300 + s;
        const auto inst = inject_failure(c, "X1", 100);
        const auto x2 = inst.panel.series("X2");
        double pre = 0.0, post = 0.0;
        for (std::size_t t = 0; t < 100; ++t) pre += static_cast<double>(x2[t]);
        for (std::size_t t = 100; t <= inst.crash_slot; ++t) post += static_cast<double>(x2[t]);
        diff.push_back(post / static_cast<double>(inst.crash_slot - 99) - pre / 100.0);
    }
    double m = 0.0, v = 0.0;
    for (double d : diff) m += d;
    m /= static_cast<double>(diff.size());
    for (double d : diff) v += (d - m) * (d - m);
    v /= static_cast<double>(diff.size() - 1);
    CHECK(m / std::sqrt(v / static_cast<double>(diff.size())) > 2.33);
}

TEST_CASE("injected channel grows after the fault on average") {
    std::vector<double> mean(6, 0.0);
    for (std::uint64_t s = 0; s < 100; ++s) {
        SimConfig c;
        c.seed = 700 + s;
        const auto x3 = inject_failure(c, "X3", 90).panel.series("X3");
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += static_cast<double>(x3[90 + k]) / 100.0;
    }
    for (std::size_t k = 1; k < mean.size(); ++k) CHECK(mean[k] >= mean[k - 1]);
}

TEST_CASE("dataset cycles channels and labels are sound") {
    SimConfig c;
    c.seed = 7;
    const auto ds = generate_dataset(c, 100);
    REQUIRE(ds.instances.size() == 100);
    std::map<std::string, int> per_channel;
    for (const auto& inst : ds.instances) {
        ++per_channel[inst.injected_channel];
        CHECK(inst.true_poif >= c.n_slots / 5);
        CHECK(inst.true_poif < c.n_slots - c.n_slots / 5);
        CHECK(inst.crash_slot > inst.true_poif);
        CHECK(inst.crash_slot < c.n_slots);
        CHECK(inst.panel.n_slots() == c.n_slots);
    }
    for (const auto& ch : kChannels) {
        CHECK(per_channel[ch] >= 33);
        CHECK(per_channel[ch] <= 34);
    }
}

TEST_CASE("saved datasets are byte-identical and reload losslessly") {
    SimConfig c;
    c.seed = 7;
    const auto ds = generate_dataset(c, 6);
    const auto base = fs::temp_directory_path() / ("cfrca_sim_test_" + std::to_string(::getpid()));
    fs::remove_all(base);
    save_dataset(ds, base / "a");
    save_dataset(generate_dataset(c, 6), base / "b");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        ++files;
        CHECK(io::read_file(e.path()) == io::read_file(base / "b" / e.path().filename()));
    }
    CHECK(files == 8);
    CHECK(load_dataset(base / "a") == ds);
    fs::remove_all(base);
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig c;
    c.baseline_rate = -1.0;
    CHECK_THROWS(c.validate());
    CHECK_THROWS(generate_dataset(SimConfig{}, 0));
}
