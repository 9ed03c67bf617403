#include "dwellcert/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace dwellcert {

namespace {

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void Trajectory::write_csv(std::ostream& out) const {
    out << "t,switch_index";
    const auto n = states.empty() ? 0 : states.front().size();
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    out << ",norm\n";
    std::size_t next_switch = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::size_t label = 0;
        if (next_switch < switch_indices.size() && switch_indices[next_switch] == i) label = ++next_switch;
        out << fmt9(times[i]) << ',' << label;
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << fmt9(states[i](j));
        out << ',' << fmt9(states[i].norm()) << '\n';
    }
}

Trajectory propagate(const SwitchedSystem& system, const SwitchingSignal& signal, const Vector& x0,
                     int samples_per_interval, std::optional<double> horizon) {
    const auto report = validate_signal(signal, system.graph());
    if (!report.empty()) throw Error(ErrorCode::InadmissibleSignal, report.front().detail);
    if (signal.path.empty()) throw Error(ErrorCode::InadmissibleSignal, "signal path is empty");
    if (x0.size() != system.dimension()) throw Error(ErrorCode::DimensionMismatch, "x0 has the wrong length");
    if (!x0.allFinite()) throw Error(ErrorCode::NonFinite, "x0 must be finite");
    if (samples_per_interval < 0) throw Error(ErrorCode::InvalidArgument, "samples per interval must be non-negative");

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.active.push_back(signal.path.front());

    auto advance = [&](Vertex v, double start, double end) {
        const Matrix& a = system.subsystem(v);
        const Vector x_start = traj.states.back();
        const double span = end - start;
        for (int i = 1; i <= samples_per_interval; ++i) {
            const double dt = span * i / (samples_per_interval + 1);
            traj.times.push_back(start + dt);
            traj.states.push_back(expm(a, dt) * x_start);
            traj.active.push_back(v);
        }
        traj.times.push_back(end);
        traj.states.push_back(expm(a, span) * x_start);
        traj.active.push_back(v);
    };

    double t = 0.0;
    for (std::size_t n = 0; n < signal.switch_times.size(); ++n) {
        advance(signal.path[n], t, signal.switch_times[n]);
        traj.switch_indices.push_back(traj.times.size() - 1);
        t = signal.switch_times[n];
    }
    if (horizon) {
        if (!(*horizon > t) || !std::isfinite(*horizon)) {
            throw Error(ErrorCode::InvalidArgument, "horizon must exceed the last switching time");
        }
        advance(signal.path.back(), t, *horizon);
    }
    return traj;
}

SwitchingSignal random_signal(const SwitchGraph& graph, const VertexPath& cycle, const IntervalMap& intervals,
                              std::size_t switch_count, std::uint64_t seed) {
    if (!is_loop(cycle)) throw Error(ErrorCode::NotALoop, "random signals follow a closed loop");
    for (const auto& e : path_edges(cycle)) {
        if (!graph.has_edge(e)) throw Error(ErrorCode::InadmissibleSignal, to_string(e) + " is not an edge");
        const auto it = intervals.find(e);
        if (it == intervals.end()) throw Error(ErrorCode::MissingInterval, "no interval for " + to_string(e));
        if (!(it->second.lo >= 0.0) || !(it->second.hi > it->second.lo) || !std::isfinite(it->second.hi)) {
            throw Error(ErrorCode::EmptyInterval, "interval for " + to_string(e) + " is empty or unbounded");
        }
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);

    const auto loop_edges = path_edges(cycle);
    SwitchingSignal signal{{cycle.front()}, {}};
    double t = 0.0;
    for (std::size_t n = 0; n < switch_count; ++n) {
        const Edge e = loop_edges[n % loop_edges.size()];
        const Interval iv = intervals.at(e);
        // Open interval: resample the measure-zero endpoints.
        double dwell = iv.lo;
        while (!iv.contains(dwell)) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            dwell = iv.lo + u * iv.width();
        }
        t += dwell;
        signal.path.push_back(e.to);
        signal.switch_times.push_back(t);
    }
    return signal;
}

DecayFit decay_fit(const Trajectory& trajectory) {
    if (trajectory.switch_indices.size() < 4) throw Error(ErrorCode::TooFewSamples, "decay fit needs at least four switches");
    std::vector<double> ts;
    std::vector<double> ys;
    std::vector<std::size_t> idx{0};
    idx.insert(idx.end(), trajectory.switch_indices.begin(), trajectory.switch_indices.end());
    for (std::size_t i : idx) {
        const double norm = trajectory.norm_at(i);
        if (!(norm > 0.0)) throw Error(ErrorCode::ZeroState, "state norm vanished; log-linear fit undefined");
        ts.push_back(trajectory.times[i]);
        ys.push_back(std::log(norm));
    }
    const double m = static_cast<double>(ts.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i] / m;
        my += ys[i] / m;
    }
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sty / stt;
    const double intercept = my - slope * mt;
    double sse = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (intercept + slope * ts[i]);
        sse += r * r;
    }
    DecayFit fit;
    fit.alpha_hat = std::exp(intercept);
    fit.beta_hat = -slope;
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace dwellcert
