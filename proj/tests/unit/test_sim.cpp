#include "dwellcert/io.hpp"
#include "dwellcert/sim.hpp"

#include "../support/oracles.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace dwellcert;
using namespace dwellcert::testing;
using Catch::Approx;

TEST_CASE("propagation matches fixed-step integration", "[sim][property]") {
    const auto r = simulator_matches_integration();
    INFO(r.detail);
    CHECK(r.ok);
}

TEST_CASE("two-subsystem trajectory decays inside its envelope", "[sim]") {
    const auto doc = load_fixture("supplied_basis");
    const auto sys = build_system(doc);
    const auto cert = certify_with_intervals(sys, doc.intervals);
    const Vector x0 = Eigen::Vector2d(5.0, -2.0);
    const auto traj = propagate(sys, *doc.signal, x0);
    REQUIRE(traj.switch_indices.size() == 12);
    CHECK(traj.times.size() == 1 + 12 * 17);
    const double n0 = x0.norm();
    CHECK(traj.norm_at(traj.switch_indices.back()) < n0);
    const auto env = decay_envelope(cert, *doc.signal);
    for (std::size_t n = 0; n < env.size(); ++n) CHECK(traj.norm_at(traj.switch_indices[n]) / n0 <= env[n].bound);

    const auto fit = decay_fit(traj);
    CHECK(fit.beta_hat > 0.0);
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);
}

TEST_CASE("trajectory samples and CSV", "[sim]") {
    const auto sys = diagonal_system(ring_graph(2), {{-1.0, -1.0}, {-2.0, -2.0}});
    const auto signal = signal_from_dwells({1, 2, 1}, {1.0, 0.5});
    const auto traj = propagate(sys, signal, Eigen::Vector2d(1.0, 0.0), 1, 3.0);
    CHECK(traj.times == std::vector<double>{0.0, 0.5, 1.0, 1.25, 1.5, 2.25, 3.0});
    CHECK(traj.active == std::vector<Vertex>{1, 1, 1, 2, 2, 1, 1});
    CHECK(traj.norm_at(4) == Approx(std::exp(-2.0)));
    CHECK(traj.norm_at(6) == Approx(std::exp(-3.5)));

    std::ostringstream csv;
    traj.write_csv(csv);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,switch_index,x1,x2,norm");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 7);
    CHECK(rows[2].rfind("1,1,", 0) == 0);
    CHECK(rows[4].rfind("1.5,2,", 0) == 0);
    CHECK(rows[5].rfind("2.25,0,", 0) == 0);
}

TEST_CASE("propagation rejects bad input", "[sim]") {
    const auto sys = diagonal_system(ring_graph(2), {{-1.0, -1.0}, {-1.0, -1.0}});
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ParseError;
    };
    const auto ok = signal_from_dwells({1, 2}, {1.0});
    CHECK(code_of([&] { (void)propagate(sys, SwitchingSignal{{1, 1}, {1.0}}, Eigen::Vector2d(1, 0)); }) ==
          ErrorCode::InadmissibleSignal);
    CHECK(code_of([&] { (void)propagate(sys, ok, Eigen::Vector3d(1, 0, 0)); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { (void)propagate(sys, ok, Eigen::Vector2d(NAN, 0)); }) == ErrorCode::NonFinite);
    CHECK(code_of([&] { (void)propagate(sys, ok, Eigen::Vector2d(1, 0), 4, 0.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("constant signal in an unstable subsystem grows", "[sim]") {
    const auto sys = build_system(load_fixture("diagonal_pair"));
    const auto traj = propagate(sys, SwitchingSignal{{1}, {}}, Eigen::Vector2d(0.0, 1.0), 16, 10.0);
    CHECK(traj.states.back().norm() == Approx(std::exp(10.0)).epsilon(1e-10));
}

TEST_CASE("random in-class signals are seeded", "[sim]") {
    const auto doc = load_fixture("supplied_basis");
    const auto g = document_graph(doc);
    const auto a = random_signal(g, {1, 2, 1}, doc.intervals, 50, 9);
    const auto b = random_signal(g, {1, 2, 1}, doc.intervals, 50, 9);
    const auto c = random_signal(g, {1, 2, 1}, doc.intervals, 50, 10);
    CHECK(a.switch_times == b.switch_times);
    CHECK(a.switch_times != c.switch_times);
    REQUIRE(a.path.size() == 51);
    CHECK(a.path[1] == 2);
    CHECK(in_signal_class(a, g, doc.intervals));

    IntervalMap unbounded = doc.intervals;
    unbounded[{1, 2}] = {1.0, INFINITY};
    CHECK_THROWS_AS(random_signal(g, {1, 2, 1}, unbounded, 5, 1), Error);
    CHECK_THROWS_AS(random_signal(g, {1, 2}, doc.intervals, 5, 1), Error);
}

TEST_CASE("decay fit on an exact exponential", "[sim]") {
    const auto sys = diagonal_system(ring_graph(2), {{-0.3, -0.3}, {-0.3, -0.3}});
    const auto signal = periodic_signal({1, 2, 1}, {1.0, 2.0}, 3);
    const auto traj = propagate(sys, signal, Eigen::Vector2d(2.0, 0.0), 0);
    const auto fit = decay_fit(traj);
    CHECK(fit.beta_hat == Approx(0.3));
    CHECK(fit.alpha_hat == Approx(2.0));
    CHECK(fit.r_squared == Approx(1.0));

    const auto short_traj = propagate(sys, signal_from_dwells({1, 2}, {1.0}), Eigen::Vector2d(1, 0), 0);
    CHECK_THROWS_AS(decay_fit(short_traj), Error);
    const auto zero = propagate(sys, signal, Eigen::Vector2d(0.0, 0.0), 0);
    try {
        (void)decay_fit(zero);
        FAIL("expected ZeroState");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroState);
    }
}
