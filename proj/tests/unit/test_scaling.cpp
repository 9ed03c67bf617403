#include "dwellcert/io.hpp"
#include "dwellcert/planar.hpp"
#include "dwellcert/scaling.hpp"

#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dwellcert;
using namespace dwellcert::testing;
using Catch::Approx;

namespace {

ScalingAssignment diagonal_example_assignment(double eta12, double eta21) {
    ScalingAssignment a;
    a.log_diagonals = {Eigen::Vector2d(2.0, -3.0), Eigen::Vector2d(0.0, 0.0)};
    a.etas = {{{1, 2}, eta12}, {{2, 1}, eta21}};
    return a;
}

}  // namespace

TEST_CASE("scaled objective on the commuting diagonal pair", "[scaling]") {
    const auto sys = build_system(load_fixture("diagonal_pair"));
    for (double e12 : {1.5, 1.9, 2.2, 2.5, 2.9, 3.1, 4.0}) {
        for (double e21 : {1.0, 1.4, 1.6, 1.75, 1.95, 2.1}) {
            // Everything is diagonal: log norms are max of exponent sums.
            const double expected = std::max({2.0 - e12, e12 - 3.0, e21 - 2.0, 3.0 - 2.0 * e21});
            CHECK(scaled_objective(sys, diagonal_example_assignment(e12, e21)) == Approx(expected).margin(1e-12));
        }
    }
}

TEST_CASE("identity scaling fails for the diagonal pair", "[scaling]") {
    const auto sys = build_system(load_fixture("diagonal_pair"));
    for (double eta : {0.1, 1.0, 2.0, 5.0}) CHECK(scaled_objective(sys, identity_assignment(sys, eta)) >= 0.0);
}

TEST_CASE("search finds a scaling for the diagonal pair", "[scaling]") {
    const auto sys = build_system(load_fixture("diagonal_pair"));
    const auto result = search(sys);
    REQUIRE(result.status == SearchStatus::Feasible);
    CHECK(result.objective < -1e-3);
    REQUIRE(result.assignment.has_value());
    CHECK(scaled_objective(normalized(sys), *result.assignment) == Approx(result.objective));
    REQUIRE(result.folded.has_value());
    // The folded system satisfies the unscaled conditions at the witnessed etas.
    for (const auto& [e, eta] : result.assignment->etas) CHECK(edge_norm(*result.folded, e, eta) < 1.0);
    const auto cert = certify(*result.folded, result.assignment->etas);
    CHECK(cert.contraction_k < 1.0);
}

TEST_CASE("search is deterministic for a seed", "[scaling]") {
    const auto sys = build_system(load_fixture("planar_pair"));
    SearchConfig config;
    config.seed = 42;
    const auto a = search(sys, config);
    const auto b = search(sys, config);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.trace == b.trace);
    CHECK(a.status == SearchStatus::Feasible);
}

TEST_CASE("search reports infeasible for the rejected examples", "[scaling]") {
    for (const char* name : {"trace_obstructed", "four_vertex_obstructed"}) {
        SearchConfig config;
        config.restarts = 16;
        const auto result = search(build_system(load_fixture(name)), config);
        CHECK(result.status == SearchStatus::InfeasibleWithinBudget);
        CHECK(result.objective >= 0.0);
        CHECK_FALSE(result.folded.has_value());
        CHECK(std::string(to_string(result.status)) == "infeasible-within-budget");
    }
}

TEST_CASE("fold rejects infeasible and malformed assignments", "[scaling]") {
    const auto sys = build_system(load_fixture("diagonal_pair"));
    try {
        (void)fold(sys, diagonal_example_assignment(1.0, 1.0));
        FAIL("expected InfeasibleAssignment");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasibleAssignment);
    }
    auto short_diag = diagonal_example_assignment(2.5, 1.75);
    short_diag.log_diagonals.pop_back();
    CHECK_THROWS_AS(fold(sys, short_diag), Error);

    const auto folded = fold(sys, diagonal_example_assignment(2.5, 1.75));
    CHECK(folded.decomposition(1).P()(0, 0) == Approx(std::exp(2.0)));
    CHECK(edge_norm(folded, {1, 2}, 2.5) == Approx(std::exp(-0.5)));
}

TEST_CASE("complex blocks share one scale", "[scaling]") {
    Matrix rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    const auto stable = diagonal_system(ring_graph(2), {{-1.0, -1.0}, {-1.0, -1.0}});
    const SwitchedSystem sys(ring_graph(2), {rot, stable.subsystem(2)},
                             {real_jordan(rot), stable.decomposition(2)});
    ScalingAssignment a = identity_assignment(sys, 1.0);
    a.log_diagonals[0] = Eigen::Vector2d(0.0, 1.0);
    try {
        (void)fold(sys, a);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("stable identity systems", "[scaling]") {
    const auto minus_i = diagonal_system(ring_graph(2), {{-1.0, -1.0}, {-1.0, -1.0}});
    CHECK(scaled_objective(minus_i, identity_assignment(minus_i, 1.0)) == Approx(-1.0));
    const auto same = fold(minus_i, identity_assignment(minus_i, 1.0));
    for (Vertex v = 1; v <= 2; ++v) CHECK(same.decomposition(v).P() == minus_i.decomposition(v).P());

    const auto hurwitz = diagonal_system(ring_graph(2), {{-1.0, -2.0}, {-1.0, -2.0}});
    SearchConfig config;
    config.restarts = 8;
    const auto r = search(hurwitz, config);
    REQUIRE(r.status == SearchStatus::Feasible);
    for (Vertex v = 1; v <= 2; ++v) CHECK(r.folded->decomposition(v).reconstruction_residual() < 1e-9);
}

TEST_CASE("search agrees with the diagonal ground truth", "[scaling]") {
    std::mt19937_64 rng(77);
    int checked = 0;
    while (checked < 6) {
        const double alpha = -uniform(rng, 0.3, 2.0);
        const double beta = uniform(rng, 0.1, 1.5);
        const double gamma = uniform(rng, 0.1, 1.5);
        const double delta = -uniform(rng, 0.3, 2.0);
        // Stay away from the boundary beta gamma = alpha delta.
        if (std::abs(std::log(beta * gamma / (alpha * delta))) < 0.3) continue;
        ++checked;
        const auto sys = diagonal_system(ring_graph(2), {{alpha, beta}, {gamma, delta}});
        SearchConfig config;
        config.restarts = 16;
        config.seed = static_cast<std::uint64_t>(checked);
        const bool feasible = search(sys, config).status == SearchStatus::Feasible;
        INFO("alpha=" << alpha << " beta=" << beta << " gamma=" << gamma << " delta=" << delta);
        CHECK(feasible == diagonal_hurwitz_combination(alpha, beta, gamma, delta));
    }
}
