#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "common/error.hpp"
#include "dcbn/dcbn.hpp"
#include "dcbn/discretizer.hpp"
#include "pipeline/experiment.hpp"
#include "simulator/simulator.hpp"
#include "support/oracles.hpp"

using namespace cfrca;

namespace {
CountPanel single(const std::string& var, std::vector<std::int64_t> values) {
    CountPanel p;
    p.variables = {var};
    p.counts = {std::move(values)};
    return p;
}

// A(0) -> Y(0) with a known Y table.
Dcbn chain_model(std::vector<double> y_table, std::vector<double> a_prior, int K) {
    LaggedDag g(1, {{"A", 0}, {"Y", 0}});
    g.add_edge({"A", 0}, {"Y", 0});
    Cpt a{{"A", 0}, {}, K, std::move(a_prior)};
    Cpt y{{"Y", 0}, {{"A", 0}}, K, std::move(y_table)};
    return Dcbn(g, oracle::identity_discretizer({"A", "Y"}, K), "Y", {a, y});
}

const TrainResult& trained() {
    static const TrainResult r = [] {
        SimConfig c;
        c.seed = 7;
        return train_model(generate_dataset(c, 100), ground_truth_graph());
    }();
    return r;
}
}  // namespace

TEST_CASE("quantile edges for uniform counts sit near a third and two thirds") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::int64_t> u(0, 8);
    std::vector<std::int64_t> x(10000);
    for (auto& v : x) v = u(rng);
    const std::vector<CountPanel> panels{single("A", x)};
    const auto d = fit_discretizer(panels, 3);
    CHECK(std::fabs(d.edges[0][0] - 3.0) <= 0.5);
    CHECK(std::fabs(d.edges[0][1] - 6.0) <= 0.5);
    for (std::int64_t v = 0; v <= 8; ++v) {
        const int s = d.state(0, static_cast<double>(v));
        CHECK(s >= 0);
        CHECK(s < 3);
    }
}

TEST_CASE("constant variables get degenerate edges and a warning") {
    const std::vector<CountPanel> panels{single("A", std::vector<std::int64_t>(50, 4))};
    for (const auto& d : {fit_discretizer(panels, 3), fit_envelope_discretizer(panels, default_envelope_z(3))}) {
        CHECK_FALSE(d.warnings.empty());
        CHECK(d.state(0, 4.0) == 0);
        CHECK_NOTHROW(d.validate());
    }
}

TEST_CASE("envelope edges are mean plus z standard deviations") {
    const std::vector<CountPanel> panels{single("A", {2, 4, 4, 4, 5, 5, 7, 9})};
    const std::vector<double> z{1.0, 2.0};
    const auto d = fit_envelope_discretizer(panels, z);
    const double sd = std::sqrt(32.0 / 7.0);
    CHECK(d.edges[0][0] == doctest::Approx(5.0 + sd));
    CHECK(d.edges[0][1] == doctest::Approx(5.0 + 2.0 * sd));
}

TEST_CASE("states partition the counts") {
    const auto d = oracle::identity_discretizer({"A"}, 3);
    CHECK(d.state(0, 0.0) == 0);
    CHECK(d.state(0, 1.0) == 1);
    CHECK(d.state(0, 2.0) == 2);
    CHECK(d.state(0, 1e9) == 2);
}

TEST_CASE("laplace smoothing of a root prior") {
    const std::vector<CountPanel> panels{single("Y", std::vector<std::int64_t>(97, 5))};
    const auto m = fit_cpts(LaggedDag::full_grid({"Y"}, 0), panels, oracle::identity_discretizer({"Y"}, 3), 1.0, "Y");
    CHECK(m.factor({"Y", 0}).table[2] == doctest::Approx(98.0 / 100.0).epsilon(1e-12));
}

TEST_CASE("zero smoothing is rejected") {
    const std::vector<CountPanel> panels{single("Y", std::vector<std::int64_t>(10, 1))};
    CHECK_THROWS_AS(fit_cpts(LaggedDag::full_grid({"Y"}, 0), panels, oracle::identity_discretizer({"Y"}, 3), 0.0, "Y"),
                    ValidationError);
}

TEST_CASE("fitted tables are normalized") {
    for (const auto& cpt : trained().model->factors()) {
        for (std::size_t r = 0; r < cpt.rows(); ++r) {
            double s = 0.0;
            for (double v : cpt.row(r)) s += v;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("query over all assignments sums to one") {
    std::mt19937_64 rng(2);
    const auto m = oracle::random_dcbn(rng, 4, 3);
    const auto t = oracle::joint_table(m);
    double total = 0.0;
    for (const auto& x : t.assignments) {
        Query q;
        for (std::size_t i = 0; i < x.size(); ++i) q.query[m.graph().nodes()[i]] = x[i];
        total += query_prob(m, q);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-factor query reads the table") {
    const auto m = chain_model({0.7, 0.3, 0.1, 0.9}, {0.4, 0.6}, 2);
    CHECK(query_prob(m, {{{{"Y", 0}, 1}}, {{{"A", 0}, 0}}}) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(query_prob(m, {{{{"Y", 0}, 0}}, {{{"A", 0}, 1}}}) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("query matches the brute-force joint table") {
    std::mt19937_64 rng(3);
    for (int net = 0; net < 10; ++net) {
        const auto m = oracle::random_dcbn(rng, 4, 3);
        const auto& nodes = m.graph().nodes();
        std::uniform_int_distribution<int> state(0, 2), count(1, 2);
        for (int k = 0; k < 10; ++k) {
            std::vector<std::size_t> order(nodes.size());
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            Query q;
            const int nq = count(rng);
            const int ne = std::uniform_int_distribution<int>(0, static_cast<int>(nodes.size()) - nq)(rng);
            for (int a = 0; a < nq; ++a) q.query[nodes[order[static_cast<std::size_t>(a)]]] = state(rng);
            for (int a = 0; a < ne; ++a) q.evidence[nodes[order[static_cast<std::size_t>(nq + a)]]] = state(rng);
            CHECK(query_prob(m, q) == doctest::Approx(oracle::conditional(m, q.query, q.evidence)).epsilon(1e-10));
        }
    }
}

TEST_CASE("joint factorizes by the chain rule") {
    std::mt19937_64 rng(4);
    const auto m = oracle::random_dcbn(rng, 5, 3);
    const auto t = oracle::joint_table(m);
    for (std::size_t a = 0; a < t.assignments.size(); a += 7) {
        CHECK(m.joint(t.assignments[a]) == doctest::Approx(t.probs[a]).epsilon(1e-14));
    }
}

TEST_CASE("failure probability is a table row lookup") {
    const auto m = chain_model({0.9, 0.08, 0.02, 0.3, 0.4, 0.3, 0.1, 0.1, 0.8}, {0.5, 0.3, 0.2}, 3);
    CountPanel p;
    p.variables = {"A", "Y"};
    p.counts = {{0, 0, 2}, {0, 0, 0}};
    const auto pf = predict_failure_prob(m, p);
    REQUIRE(pf.values.size() == 2);
    CHECK(pf.start_slot == 1);
    CHECK(pf.values[0] == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(pf.values[1] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("nominal operation keeps failure probability low") {
    double total = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        SimConfig c;
        c.seed = 9100 + k;
        const auto pf = predict_failure_prob(*trained().model, generate_normal(c));
        double s = 0.0;
        for (double v : pf.values) s += v;
        total += s / static_cast<double>(pf.values.size());
    }
    CHECK(total / 50.0 < 0.1);
}

TEST_CASE("failure probability rises after the fault") {
    SimConfig c;
    c.seed = 31;
    const auto ds = generate_dataset(c, 100);
    int higher = 0;
    for (const auto& inst : ds.instances) {
        const auto w = training_window(inst);
        const auto pf = predict_failure_prob(*trained().model, w);
        double pre = 0.0, post = 0.0;
        std::size_t n_pre = 0, n_post = 0;
        for (std::size_t k = 0; k < pf.values.size(); ++k) {
            const auto t = pf.start_slot + k;
            if (t < inst.true_poif) pre += pf.values[k], ++n_pre;
            else post += pf.values[k], ++n_post;
        }
        if (post / static_cast<double>(n_post) > pre / static_cast<double>(n_pre)) ++higher;
    }
    CHECK(higher >= 95);
}

TEST_CASE("failure probability uses only the past") {
    SimConfig c;
    c.seed = 8;
    const auto inst = inject_failure(c, "X2", 100);
    const auto full = predict_failure_prob(*trained().model, inst.panel);
    for (std::size_t t : {10u, 99u, 104u}) {
        const auto cut = predict_failure_prob(*trained().model, window_to_failure(inst.panel, t, t + 1));
        CHECK(cut.values.back() == full.values[t - full.start_slot]);
    }
}

TEST_CASE("rmse of a perfect and a maximally wrong prediction") {
    CountPanel p;
    p.variables = {"Y"};
    p.counts = {{0, 4, 2, 4, 0}};
    ProbSeries exact{0, {0.0, 1.0, 0.5, 1.0, 0.0}};
    ProbSeries wrong{0, {1.0, 0.0, 0.5, 0.0, 1.0}};
    CHECK(prediction_rmse(exact, p, "Y") == doctest::Approx(0.0));
    CountPanel binary;
    binary.variables = {"Y"};
    binary.counts = {{1, 0, 1, 1}};
    CHECK(prediction_rmse(ProbSeries{0, {0.0, 1.0, 0.0, 0.0}}, binary, "Y") == doctest::Approx(1.0));
    CHECK(prediction_rmse(wrong, p, "Y") > 0.0);
}

TEST_CASE("held-out rmse is in range and the split is disjoint") {
    const auto& r = trained();
    CHECK(r.rmse >= 0.0);
    CHECK(r.rmse <= 0.2);
    CHECK(r.train_indices.size() == 80);
    CHECK(r.test_indices.size() == 20);
    CHECK(split_to_json(r)["disjoint"].get<bool>());
}

TEST_CASE("model JSON round-trips") {
    const auto& m = *trained().model;
    CHECK(model_from_json(model_to_json(m)) == m);
    CHECK(model_to_json(model_from_json(model_to_json(m))).dump() == model_to_json(m).dump());
}
