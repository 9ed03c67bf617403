#pragma once

// Exact piecewise propagation of switched trajectories, seeded in-class
// signals and log-linear decay fits at the switching instants.

#include "dwellcert/certify.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dwellcert {

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<std::size_t> switch_indices;  // positions of t_1..t_N in `times`
    std::vector<Vertex> active;               // subsystem active on (times[i-1], times[i]]; active[0] = sigma(0)

    [[nodiscard]] double norm_at(std::size_t i) const { return states.at(i).norm(); }
    /// Writes `t,switch_index,x1..xn,norm`; switch_index is n at t_n and 0 elsewhere.
    void write_csv(std::ostream& out) const;
};

/// Advances x0 by expm of the active subsystem on each dwell interval, with
/// `samples_per_interval` interior points per interval. `horizon`, when given,
/// appends a final stretch in the last subsystem up to that absolute time.
[[nodiscard]] Trajectory propagate(const SwitchedSystem& system, const SwitchingSignal& signal, const Vector& x0,
                                   int samples_per_interval = 16, std::optional<double> horizon = std::nullopt);

/// Walks `cycle` (a closed loop, repeated as needed) for `switch_count`
/// switches, drawing each dwell uniformly from the traversed edge's interval.
[[nodiscard]] SwitchingSignal random_signal(const SwitchGraph& graph, const VertexPath& cycle,
                                            const IntervalMap& intervals, std::size_t switch_count,
                                            std::uint64_t seed);

struct DecayFit {
    double alpha_hat = 1.0;
    double beta_hat = 0.0;  // positive means decay
    double r_squared = 0.0;
};

/// Least squares on (t, ln ||x(t)||) over t = 0 and the switching instants.
/// Throws TooFewSamples below four switches, ZeroState on a zero norm.
[[nodiscard]] DecayFit decay_fit(const Trajectory& trajectory);

}  // namespace dwellcert
