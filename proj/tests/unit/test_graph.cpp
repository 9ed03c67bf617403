#include "dwellcert/error.hpp"
#include "dwellcert/graph.hpp"

#include "../support/oracles.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace dwellcert;
using namespace dwellcert::testing;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("standard decomposition golden path", "[graph]") {
    const auto d = standard_decomposition({1, 2, 3, 2, 3, 1, 2});
    REQUIRE(d.loops.size() == 2);
    CHECK(d.loops[0] == VertexPath{2, 3, 2});
    CHECK(d.loops[1] == VertexPath{1, 2, 3, 1});
    CHECK(d.remainder == VertexPath{1, 2});
}

TEST_CASE("standard decomposition edge cases", "[graph]") {
    CHECK(standard_decomposition({}).remainder.empty());
    CHECK(standard_decomposition({4}).remainder == VertexPath{4});
    const auto closed = standard_decomposition({1, 2, 1});
    CHECK(closed.loops == std::vector<VertexPath>{{1, 2, 1}});
    CHECK(closed.remainder == VertexPath{1});
}

TEST_CASE("decomposition conserves edges", "[graph][property]") {
    const auto r = decomposition_conserves_edges();
    INFO(r.detail);
    CHECK(r.ok);
}

TEST_CASE("loop enumeration matches brute force", "[graph]") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        std::vector<Edge> edges;
        for (int r = 1; r <= k; ++r) {
            for (int s = 1; s <= k; ++s) {
                if (r != s && uniform(rng, 0.0, 1.0) < 0.4) edges.push_back({r, s});
            }
        }
        const SwitchGraph g(k, edges);
        const auto loops = enumerate_simple_loops(g);
        CHECK(loops == brute_force_cycles(g));
        CHECK(is_acyclic(g) == loops.empty());
    }
}

TEST_CASE("complete graph loop count", "[graph]") {
    std::vector<Edge> edges;
    for (int r = 1; r <= 5; ++r) {
        for (int s = 1; s <= 5; ++s) {
            if (r != s) edges.push_back({r, s});
        }
    }
    // sum over m of C(5,m) (m-1)!
    CHECK(enumerate_simple_loops(SwitchGraph(5, edges)).size() == 84);
    CHECK(code_of([&] { (void)enumerate_simple_loops(SwitchGraph(5, edges), 10); }) == ErrorCode::TooManyLoops);
}

TEST_CASE("graph construction is validated", "[graph]") {
    CHECK(code_of([] { SwitchGraph(2, {{1, 1}}); }) == ErrorCode::InvalidGraph);
    CHECK(code_of([] { SwitchGraph(2, {{1, 2}, {1, 2}}); }) == ErrorCode::InvalidGraph);
    CHECK(code_of([] { SwitchGraph(2, {{1, 3}}); }) == ErrorCode::InvalidGraph);
    CHECK(code_of([] { SwitchGraph(0, {}); }) == ErrorCode::InvalidGraph);
    const auto ring = ring_graph(3);
    CHECK(ring.has_edge({3, 1}));
    CHECK_FALSE(ring.has_edge({1, 3}));
    const auto reach = SwitchGraph(3, {{1, 2}}).reachability();
    CHECK(reach[0][1]);
    CHECK_FALSE(reach[1][0]);
    CHECK(reach[2][2]);
}

TEST_CASE("signal admissibility", "[graph]") {
    const auto g = ring_graph(3);
    CHECK(validate_signal(signal_from_dwells({1, 2, 3, 1}, {1.0, 0.5, 2.0}), g).empty());

    const auto bad_edge = validate_signal(SwitchingSignal{{1, 3}, {1.0}}, g);
    REQUIRE(bad_edge.size() == 1);
    CHECK(bad_edge[0].kind == ViolationKind::NonEdge);

    const auto bad_time = validate_signal(SwitchingSignal{{1, 2, 3}, {1.0, 1.0}}, g);
    REQUIRE_FALSE(bad_time.empty());
    CHECK(bad_time[0].kind == ViolationKind::NonIncreasingTime);

    CHECK(validate_signal(SwitchingSignal{{1, 2}, {0.0}}, g)[0].kind == ViolationKind::NonPositiveTime);
    CHECK(validate_signal(SwitchingSignal{{1, 2}, {}}, g)[0].kind == ViolationKind::CountMismatch);
    CHECK(validate_signal(SwitchingSignal{{1, 7}, {1.0}}, g)[0].kind == ViolationKind::UnknownVertex);
}

TEST_CASE("occupancy and signal classes", "[graph]") {
    const auto g = ring_graph(2);
    const auto sig = periodic_signal({1, 2, 1}, {2.0, 0.75}, 3);
    REQUIRE(sig.switch_count() == 6);
    CHECK(sig.switch_times.back() == Catch::Approx(8.25));
    CHECK(sig.dwell(2) == Catch::Approx(0.75));
    const auto occ = edge_occupancy(sig, g);
    CHECK(occ.at({1, 2}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(occ.at({2, 1}).size() == 3);

    IntervalMap intervals{{{1, 2}, {1.0, 4.0}}, {{2, 1}, {0.5, 3.0}}};
    CHECK(in_signal_class(sig, g, intervals));
    intervals[{2, 1}] = {0.75, 3.0};  // open interval excludes its endpoint
    CHECK_FALSE(in_signal_class(sig, g, intervals));
    intervals.erase({2, 1});
    CHECK(code_of([&] { (void)in_signal_class(sig, g, intervals); }) == ErrorCode::MissingInterval);
    CHECK(code_of([] { (void)periodic_signal({1, 2}, {1.0}, 1); }) == ErrorCode::NotALoop);
}
