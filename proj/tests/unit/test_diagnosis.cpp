#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "diagnosis/counterfactual.hpp"
#include "diagnosis/diagnose.hpp"
#include "diagnosis/paths.hpp"
#include "diagnosis/poif.hpp"
#include "pipeline/experiment.hpp"
#include "simulator/simulator.hpp"
#include "support/oracles.hpp"

using namespace cfrca;

namespace {
const Dcbn& model() {
    static const Dcbn m = [] {
        SimConfig c;
        c.seed = 7;
        return *train_model(generate_dataset(c, 100), ground_truth_graph()).model;
    }();
    return m;
}

const Dataset& faulty() {
    static const Dataset d = [] {
        SimConfig c;
        c.seed = 77;
        return generate_dataset(c, 20);
    }();
    return d;
}

// First slot whose smoothed central second difference exceeds theta,
// written out directly.
std::optional<std::size_t> hand_poif(const std::vector<double>& x, double theta) {
    std::vector<double> s(x.size(), 0.0);
    for (std::size_t k = 1; k + 1 < x.size(); ++k) s[k] = (x[k - 1] + x[k] + x[k + 1]) / 3.0;
    for (std::size_t k = 2; k + 2 < x.size(); ++k) {
        if (s[k - 1] - 2.0 * s[k] + s[k + 1] > theta) return k;
    }
    return std::nullopt;
}
}  // namespace

TEST_CASE("constant series is never a PoIF") {
    CHECK_FALSE(detect_poif({0, std::vector<double>(20, 0.3)}, 0.01).detected);
}

TEST_CASE("seven-point curvature onset") {
    const std::vector<double> x{0, 0, 0, 0, 0.2, 0.6, 1.0};
    const auto r = detect_poif({0, x}, 0.05);
    const auto expected = hand_poif(x, 0.05);
    REQUIRE(expected);
    REQUIRE(r.detected);
    CHECK(r.T == *expected);
    CHECK(r.second_derivative[2] == doctest::Approx(0.2 / 3.0));
    CHECK(r.second_derivative[3] == doctest::Approx(0.4 / 3.0));
}

TEST_CASE("linear ramp has no curvature") {
    std::vector<double> x;
    for (int k = 0; k <= 20; ++k) x.push_back(k / 20.0);
    CHECK_FALSE(detect_poif({0, x}, 1e-9).detected);
}

TEST_CASE("poif detection shifts with the series origin") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(30);
        for (auto& v : x) v = u(rng);
        const auto a = detect_poif({0, x}, 0.2), b = detect_poif({13, x}, 0.2);
        REQUIRE(a.detected == b.detected);
        if (a.detected) CHECK(b.T == a.T + 13);
        const auto h = hand_poif(x, 0.2);
        CHECK(a.detected == h.has_value());
        if (h) CHECK(a.T == *h);
    }
}

TEST_CASE("ground truth has six root-to-alarm paths") {
    const auto paths = enumerate_paths(ground_truth_graph(), kAlarm);
    CHECK(paths.size() == 6);
    for (const auto& p : paths) CHECK(p.nodes.back() == Node{kAlarm, 0});
}

TEST_CASE("single edge gives a single path") {
    LaggedDag g(1, {{"A", 0}, {"Y", 0}});
    g.add_edge({"A", 0}, {"Y", 0});
    const auto paths = enumerate_paths(g, "Y");
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].nodes == std::vector<Node>{{"A", 0}, {"Y", 0}});
}

TEST_CASE("path count matches adjacency matrix powers") {
    std::mt19937_64 rng(6);
    std::bernoulli_distribution coin(0.35);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = LaggedDag::full_grid({"A", "B", "C", "Y"}, 1);
        for (const auto& from : g.nodes())
            for (const auto& to : g.nodes())
                if (coin(rng) && g.can_add_edge(from, to)) g.add_edge(from, to);
        const auto sink = g.require_index({"Y", 0});
        if (g.in_degree(sink) == 0) continue;
        CHECK(enumerate_paths(g, "Y").size() == oracle::path_count_by_matrix_powers(g, sink));
    }
}

TEST_CASE("path likelihoods match the brute-force conditional") {
    std::mt19937_64 rng(7);
    const auto m = oracle::random_tables(ground_truth_graph(), 3, kAlarm, rng);
    CountPanel p;
    p.variables = {"X1", "X2", "X3", "Y"};
    std::uniform_int_distribution<std::int64_t> state(0, 2);
    p.counts.assign(4, std::vector<std::int64_t>(6));
    for (auto& row : p.counts)
        for (auto& v : row) v = state(rng);
    const auto x = observe_states(m, p, 4);
    for (const auto& path : rank_paths(m, p, 4)) {
        std::map<Node, int> q, e;
        for (std::size_t i = 0; i < m.graph().size(); ++i) {
            const auto& n = m.graph().nodes()[i];
            const bool on = std::find(path.nodes.begin(), path.nodes.end(), n) != path.nodes.end();
            (on ? q : e)[n] = x[i];
        }
        CHECK(path.likelihood >= 0.0);
        CHECK(path.likelihood <= 1.0);
        CHECK(path.likelihood == doctest::Approx(oracle::conditional(m, q, e)).epsilon(1e-10));
    }
}

TEST_CASE("path ranking orders likelihoods") {
    const auto& inst = faulty().instances[0];
    const auto w = training_window(inst);
    const auto asc = rank_paths(model(), w, w.n_slots() - 1, PathOrder::LeastLikelyFirst);
    const auto desc = rank_paths(model(), w, w.n_slots() - 1, PathOrder::MostLikelyFirst);
    REQUIRE(asc.size() == 6);
    for (std::size_t k = 1; k < asc.size(); ++k) {
        CHECK(asc[k - 1].likelihood <= asc[k].likelihood);
        CHECK(desc[k - 1].likelihood >= desc[k].likelihood);
        CHECK(std::isfinite(asc[k].likelihood));
    }
}

namespace {
Dcbn two_node(std::vector<double> a_prior, std::vector<double> y_table, int K) {
    LaggedDag g(1, {{"A", 0}, {"Y", 0}});
    g.add_edge({"A", 0}, {"Y", 0});
    return Dcbn(g, oracle::identity_discretizer({"A", "Y"}, K), "Y",
                {Cpt{{"A", 0}, {}, K, std::move(a_prior)}, Cpt{{"Y", 0}, {{"A", 0}}, K, std::move(y_table)}});
}
}  // namespace

TEST_CASE("abduction intervals follow the cumulative table") {
    const auto m = two_node({0.2, 0.5, 0.3}, {0.6, 0.3, 0.1, 0.3, 0.4, 0.3, 0.1, 0.2, 0.7}, 3);
    const std::vector<int> mid{1, 0};
    const auto u = abduct(m, mid);
    CHECK(u[0].lo == doctest::Approx(0.2));
    CHECK(u[0].hi == doctest::Approx(0.7));
    const std::vector<int> low{0, 2};
    const auto v = abduct(m, low);
    CHECK(v[0].lo == 0.0);
    CHECK(v[0].hi == doctest::Approx(0.2));
    CHECK(v[1].lo == doctest::Approx(0.9));
    CHECK(v[1].hi == 1.0);
}

TEST_CASE("noise drawn from the posterior reproduces the observation") {
    std::mt19937_64 rng(8);
    const auto m = oracle::random_dcbn(rng, 5, 3);
    const auto t = oracle::joint_table(m);
    for (std::size_t a = 0; a < t.assignments.size(); a += 11) {
        const auto& x = t.assignments[a];
        const auto u = abduct(m, x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto row = m.factors()[i].row(m.row_of(i, x));
            for (double f : {0.0, 0.5, 0.999999}) {
                CHECK(mechanism_state(row, u[i].lo + f * u[i].width()) == x[i]);
            }
        }
    }
}

TEST_CASE("two-node counterfactual by interval overlap") {
    // Y rows: A=L (0.7, 0.3), A=H (0.2, 0.8). Observed A=H, Y=H puts U_Y in
    // [0.2, 1); under do(A=L), Y=L needs U_Y < 0.7: (0.7 - 0.2) / 0.8.
    const auto m = two_node({0.5, 0.5}, {0.7, 0.3, 0.2, 0.8}, 2);
    const std::vector<int> x{1, 1};
    const auto r = counterfactual(m, x, {"A", 0}, 0);
    CHECK(r.distribution[0] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(r.distribution[1] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(r.p_low == doctest::Approx(0.625).epsilon(1e-14));
}

TEST_CASE("counterfactual matches Monte Carlo noise propagation") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int net = 0; net < 40 && checked < 5; ++net) {
        const auto m = oracle::random_dcbn(rng, 5, 3);
        const auto& g = m.graph();
        const auto y = g.require_index({m.failure_var(), 0});
        std::optional<std::size_t> target;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (i != y && g.reaches(i, y) && g.nodes()[i].lag == 0) target = i;
        if (!target) continue;
        ++checked;
        std::vector<int> x(g.size());
        for (auto& v : x) v = std::uniform_int_distribution<int>(0, 2)(rng);
        const int alpha = (x[*target] + 1) % 3;
        const auto exact = counterfactual(m, x, g.nodes()[*target], alpha);
        const auto u = abduct(m, x);
        const auto order = g.topological_order();
        std::vector<double> freq(3, 0.0);
        const int draws = 200000;
        for (int d = 0; d < draws; ++d) {
            auto cf = x;
            cf[*target] = alpha;
            for (auto i : order) {
                if (i == *target || !g.reaches(*target, i)) continue;
                const double ui = u[i].lo + unit(rng) * u[i].width();
                const auto row = m.factors()[i].row(m.row_of(i, cf));
                double c = 0.0;
                int s = 0;
                while (s + 1 < 3 && ui >= (c += row[static_cast<std::size_t>(s)])) ++s;
                cf[i] = s;
            }
            freq[static_cast<std::size_t>(cf[y])] += 1.0 / draws;
        }
        double tv = 0.0;
        for (std::size_t s = 0; s < 3; ++s) tv += 0.5 * std::fabs(freq[s] - exact.distribution[s]);
        CHECK(tv < 5e-3);
    }
    CHECK(checked >= 3);
}

TEST_CASE("intervening with the factual state reproduces the factual failure") {
    const auto& m = model();
    const auto y = m.graph().require_index({kAlarm, 0});
    for (const auto& inst : faulty().instances) {
        const auto w = training_window(inst);
        const auto x = observe_states(m, w, w.n_slots() - 1);
        for (std::size_t i = 0; i < m.graph().size(); ++i) {
            const auto r = counterfactual(m, x, m.graph().nodes()[i], x[i]);
            CHECK(r.distribution[static_cast<std::size_t>(x[y])] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("interventions off the failure ancestry leave the failure factual") {
    const auto m = two_node({0.5, 0.5}, {0.7, 0.3, 0.2, 0.8}, 2);
    const std::vector<int> x{1, 1};
    CHECK(counterfactual(m, x, {"Y", 0}, 0).p_low == 1.0);
    CHECK(counterfactual(m, x, {"Y", 0}, 1).distribution[1] == 1.0);
    const auto& big = model();
    const auto& inst = faulty().instances[0];
    const auto w = training_window(inst);
    const auto s = observe_states(big, w, w.n_slots() - 1);
    const auto y = static_cast<std::size_t>(s[big.graph().require_index({kAlarm, 0})]);
    for (int a = 0; a < 3; ++a) CHECK(counterfactual(big, s, {"X2", 2}, a).distribution[y] == 1.0);
}

TEST_CASE("recourse sweep properties") {
    const auto& m = model();
    const auto& inst = faulty().instances[1];
    const auto w = training_window(inst);
    const auto t = w.n_slots() - 1;
    const auto x = observe_states(m, w, t);
    const Node node{inst.injected_channel, 0};
    const double factual = static_cast<double>(w.series(node.var)[t]);
    const std::vector<double> alphas{0.0, 5.0, 10.0, factual, 40.0};
    const auto sweep = recourse_sweep(m, x, node, alphas);
    REQUIRE(sweep.size() == alphas.size());
    for (const auto& r : sweep) {
        CHECK(r.mean >= 0.0);
        CHECK(r.mean <= 2.0);
    }
    CHECK(sweep[3].sd == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sweep[3].mean == doctest::Approx(x[m.graph().require_index({kAlarm, 0})]));
}

TEST_CASE("recourse on a nominal window stays low") {
    const auto& m = model();
    SimConfig c;
    c.seed = 4242;
    const auto p = generate_normal(c);
    const auto x = observe_states(m, p, 100);
    std::vector<double> alphas;
    for (int a = 0; a <= 20; ++a) alphas.push_back(a);
    for (const auto& r : recourse_sweep(m, x, {"X1", 0}, alphas)) CHECK(r.mean < 0.5);
}

TEST_CASE("diagnosis of a faulty instance ranks six paths") {
    const auto& inst = faulty().instances[2];
    const auto rep = diagnose(model(), training_window(inst));
    CHECK(rep.status == std::string(kStatusDetected));
    CHECK(rep.paths.size() == 6);
    CHECK(rep.evaluation_slot == rep.poif.T + 1);
    CHECK(rep.recourse.size() == 21);
}

TEST_CASE("diagnosis of nominal operation detects nothing") {
    SimConfig c;
    c.seed = 99;
    const auto rep = diagnose(model(), generate_normal(c));
    CHECK(rep.status == std::string(kStatusNotDetected));
    CHECK(rep.paths.empty());
}

TEST_CASE("report JSON round-trips") {
    const auto rep = diagnose(model(), training_window(faulty().instances[3]));
    const auto j = report_to_json(rep);
    CHECK(report_to_json(report_from_json(j)) == j);
}
