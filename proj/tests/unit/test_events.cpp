#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "event_pipeline/events.hpp"

using namespace cfrca;

TEST_CASE("empty event log has no records") {
    CHECK(parse_event_log(std::string_view{}).records.empty());
    CHECK(parse_event_log("timestamp,event_id,channel\n").records.empty());
}

TEST_CASE("records are sorted by timestamp") {
    const auto log = parse_event_log("5,e,A\n1,e,A\n3,e,B\n");
    REQUIRE(log.records.size() == 3);
    CHECK(log.records[0].timestamp == 1.0);
    CHECK(log.records[1].timestamp == 3.0);
    CHECK(log.records[2].timestamp == 5.0);
}

TEST_CASE("ties keep input order") {
    const auto log = parse_event_log("2,first,A\n2,second,A\n1,zero,A\n");
    CHECK(log.records[1].event_id == "first");
    CHECK(log.records[2].event_id == "second");
}

TEST_CASE("wrong field count is a parse error at its line") {
    try {
        parse_event_log("abc,x\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("events in one slot are tallied") {
    const auto p = count_transform(parse_event_log("0.5,a,A\n0.7,b,A\n"), 1.0, {"A"});
    REQUIRE(p.n_slots() == 1);
    CHECK(p.counts[0][0] == 2);
}

TEST_CASE("slot boundaries are half-open") {
    CountOptions opts;
    opts.start_time = 0.0;
    opts.n_slots = 2;
    const auto p = count_transform(parse_event_log("1.0,a,A\n"), 1.0, {"A"}, opts);
    CHECK(p.counts[0][0] == 0);
    CHECK(p.counts[0][1] == 1);
}

TEST_CASE("counting conserves events per channel") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> when(0.0, 500.0);
    std::uniform_int_distribution<int> which(0, 2);
    const std::vector<std::string> names{"A", "B", "C"};
    std::map<std::string, std::int64_t> expected;
    std::ostringstream csv;
    for (int i = 0; i < 1000; ++i) {
        const auto& ch = names[static_cast<std::size_t>(which(rng))];
        ++expected[ch];
        csv << when(rng) << ",ev" << i << "," << ch << "\n";
    }
    const auto p = count_transform(parse_event_log(csv.str()), 7.0, names);
    for (std::size_t v = 0; v < names.size(); ++v) {
        std::int64_t sum = 0;
        for (auto c : p.counts[v]) sum += c;
        CHECK(sum == expected[names[v]]);
    }
}

TEST_CASE("channels outside the variable list are ignored") {
    const auto p = count_transform(parse_event_log("0.1,a,A\n0.2,b,Z\n"), 1.0, {"A"});
    CHECK(p.n_vars() == 1);
    CHECK(p.counts[0][0] == 1);
}

namespace {
CountPanel ramp_panel(std::size_t n) {
    CountPanel p;
    p.variables = {"A"};
    p.counts = {{}};
    for (std::size_t k = 0; k < n; ++k) p.counts[0].push_back(static_cast<std::int64_t>(k));
    return p;
}
}  // namespace

TEST_CASE("full-length window is the identity") {
    const auto p = ramp_panel(100);
    CHECK(window_to_failure(p, 99, 100) == p);
}

TEST_CASE("window keeps the slots leading to the failure") {
    const auto w = window_to_failure(ramp_panel(100), 50, 10);
    REQUIRE(w.n_slots() == 10);
    CHECK(w.counts[0].front() == 41);
    CHECK(w.counts[0].back() == 50);
}

TEST_CASE("window longer than the available past is rejected") {
    CHECK_THROWS_WITH_AS(window_to_failure(ramp_panel(100), 5, 10), doctest::Contains("only 6 slots available"),
                         ValidationError);
}

TEST_CASE("panel CSV round-trips") {
    CountPanel p;
    p.variables = {"X1", "Y"};
    p.counts = {{1, 2, 3}, {0, 0, 7}};
    CHECK(panel_from_csv(panel_to_csv(p)) == p);
}
