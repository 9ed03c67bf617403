#include "dwellcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dwellcert {

namespace {

std::size_t index_of(Vertex v) { return static_cast<std::size_t>(v - 1); }

// Shrinks [inside, outside] (in either order) until it is narrower than tol and
// returns the end where f < 1.
template <typename F>
double bisect_boundary(const F& f, double inside, double outside, double tol) {
    for (int iter = 0; iter < 200 && std::abs(outside - inside) > tol; ++iter) {
        const double mid = 0.5 * (inside + outside);
        if (f(mid) < 1.0) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return inside;
}

double sample_sup(const EdgeNorm& f, Interval interval, int samples) {
    samples = std::max(samples, 2);
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = interval.lo + interval.width() * static_cast<double>(i) / static_cast<double>(samples);
        sup = std::max(sup, t > 0.0 ? f(t) : f.at_zero());
    }
    return sup;
}

// Feasible component around eta, found by marching outwards on the scan grid
// spacing and bisecting the crossings.
Interval component_containing(const EdgeNorm& f, double eta, const CertifyOptions& options) {
    const double h = options.t_max / static_cast<double>(options.grid_points);

    double lo = 0.0;
    double inside = eta;
    double t = eta - h;
    while (t > 0.0 && f(t) < 1.0) {
        inside = t;
        t -= h;
    }
    if (t <= 0.0) {
        lo = f.at_zero() < 1.0 ? 0.0 : bisect_boundary(f, inside, 0.0, options.refine_tol);
    } else {
        lo = bisect_boundary(f, inside, t, options.refine_tol);
    }

    double hi = options.t_max;
    inside = eta;
    t = eta + h;
    while (t < options.t_max && f(t) < 1.0) {
        inside = t;
        t += h;
    }
    if (t >= options.t_max) {
        hi = f(options.t_max) < 1.0 ? options.t_max : bisect_boundary(f, inside, options.t_max, options.refine_tol);
    } else {
        hi = bisect_boundary(f, inside, t, options.refine_tol);
    }
    return {lo, hi};
}

void check_options(const CertifyOptions& options) {
    if (!(options.t_max > 0.0) || options.grid_points < 1 || !(options.refine_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid certify options");
    }
}

std::string describe(const std::vector<EdgeFailure>& failures) {
    std::ostringstream out;
    out << "norm condition fails on";
    for (const auto& f : failures) out << ' ' << to_string(f.edge) << " (t=" << f.t << ", norm=" << f.norm << ')';
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------

SwitchedSystem::SwitchedSystem(SwitchGraph graph, std::vector<Matrix> subsystems,
                               std::vector<SpectralDecomposition> decompositions)
    : graph_(std::move(graph)), subsystems_(std::move(subsystems)), decompositions_(std::move(decompositions)) {
    const auto k = static_cast<std::size_t>(graph_.vertex_count());
    if (subsystems_.size() != k || decompositions_.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, "need one subsystem and one decomposition per vertex");
    }
    n_ = static_cast<int>(subsystems_.front().rows());
    for (std::size_t i = 0; i < k; ++i) {
        require_square_finite(subsystems_[i], "subsystem matrix");
        if (subsystems_[i].rows() != n_ || decompositions_[i].dimension() != n_) {
            throw Error(ErrorCode::DimensionMismatch, "subsystems must share one dimension");
        }
    }
}

SwitchedSystem SwitchedSystem::with_computed_decompositions(SwitchGraph graph, std::vector<Matrix> subsystems) {
    std::vector<SpectralDecomposition> decompositions;
    decompositions.reserve(subsystems.size());
    for (const auto& a : subsystems) decompositions.push_back(real_jordan(a));
    return SwitchedSystem(std::move(graph), std::move(subsystems), std::move(decompositions));
}

const Matrix& SwitchedSystem::subsystem(Vertex v) const {
    if (!graph_.contains_vertex(v)) throw Error(ErrorCode::InvalidArgument, "unknown vertex");
    return subsystems_[index_of(v)];
}

const SpectralDecomposition& SwitchedSystem::decomposition(Vertex v) const {
    if (!graph_.contains_vertex(v)) throw Error(ErrorCode::InvalidArgument, "unknown vertex");
    return decompositions_[index_of(v)];
}

Matrix SwitchedSystem::transition(Edge e) const {
    if (!graph_.has_edge(e)) throw Error(ErrorCode::NotAnEdge, to_string(e) + " is not an edge");
    return decomposition(e.to).P_inverse() * decomposition(e.from).P();
}

EdgeNorm::EdgeNorm(const SwitchedSystem& system, Edge edge)
    : edge_(edge),
      transition_(system.transition(edge)),
      blocks_(system.decomposition(edge.from).blocks()),
      transition_norm_(spectral_norm(transition_)) {}

double EdgeNorm::operator()(double t) const { return spectral_norm(transition_ * exp_jordan(blocks_, t)); }

double edge_norm(const SwitchedSystem& system, Edge edge, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "edge_norm needs t > 0");
    return EdgeNorm(system, edge)(t);
}

std::vector<Interval> feasible_interval(const SwitchedSystem& system, Edge edge, double t_max, int grid_points,
                                        double refine_tol) {
    if (!(t_max > 0.0) || grid_points < 1 || !(refine_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid scan parameters");
    }
    const EdgeNorm f(system, edge);
    const double h = t_max / static_cast<double>(grid_points);
    auto grid_t = [&](int i) { return i == grid_points ? t_max : h * static_cast<double>(i); };

    std::vector<bool> inside(static_cast<std::size_t>(grid_points) + 1);
    inside[0] = f.at_zero() < 1.0;
    for (int i = 1; i <= grid_points; ++i) inside[static_cast<std::size_t>(i)] = f(grid_t(i)) < 1.0;

    std::vector<Interval> out;
    int i = 1;
    while (i <= grid_points) {
        if (!inside[static_cast<std::size_t>(i)]) {
            ++i;
            continue;
        }
        const int first = i;
        while (i <= grid_points && inside[static_cast<std::size_t>(i)]) ++i;
        const int last = i - 1;

        const double lo = (first == 1 && inside[0])
                              ? 0.0
                              : bisect_boundary(f, grid_t(first), grid_t(first - 1), refine_tol);
        const double hi =
            last == grid_points ? t_max : bisect_boundary(f, grid_t(last), grid_t(last + 1), refine_tol);
        out.push_back({lo, hi});
    }
    return out;
}

std::optional<double> analytic_e2_endpoint(const SwitchedSystem& system, Edge edge) {
    const auto& d = system.decomposition(edge.from);
    const bool all_real = std::all_of(d.blocks().begin(), d.blocks().end(),
                                      [](const JordanBlock& b) { return b.kind == BlockKind::Real; });
    const double lambda = d.abscissa();
    const double p_norm = spectral_norm(system.transition(edge));
    if (!all_real || !(lambda > 0.0) || !(p_norm < 1.0)) return std::nullopt;
    return -std::log(p_norm) / lambda;
}

const char* to_string(EdgeClass c) noexcept { return c == EdgeClass::E1 ? "E1" : "E2"; }

std::map<Edge, EdgeClass> partition_edges(const SwitchedSystem& system) {
    std::map<Edge, EdgeClass> out;
    for (const auto& e : system.graph().edges()) {
        const double norm = spectral_norm(system.transition(e));
        out[e] = norm >= 1.0 - kPartitionTolerance ? EdgeClass::E1 : EdgeClass::E2;
    }
    return out;
}

NecessaryReport necessary_checks(const SwitchedSystem& system) {
    NecessaryReport report;
    for (const auto& [edge, cls] : partition_edges(system)) {
        if (cls != EdgeClass::E1) continue;
        const double sn = smallest_singular_value(exp_jordan(system.decomposition(edge.from).blocks(), 1.0));
        if (sn >= 1.0) report.singular_value_flags.push_back({edge, sn});
    }
    report.trace_check_applicable = system.dimension() == 2;
    if (report.trace_check_applicable) {
        for (auto& loop : enumerate_simple_loops(system.graph())) {
            std::vector<double> traces;
            for (std::size_t i = 0; i + 1 < loop.size(); ++i) traces.push_back(system.subsystem(loop[i]).trace());
            if (std::all_of(traces.begin(), traces.end(), [](double tr) { return tr >= 0.0; })) {
                report.trace_flags.push_back({std::move(loop), std::move(traces)});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

IntervalMap Certificate::intervals() const {
    IntervalMap out;
    for (const auto& c : conditions) out[c.edge] = c.interval;
    return out;
}

ConditionViolated::ConditionViolated(std::vector<EdgeFailure> failures)
    : Error(ErrorCode::ConditionViolated, describe(failures)), failures_(std::move(failures)) {}

double interval_sup_norm(const SwitchedSystem& system, Edge edge, Interval interval, int samples) {
    return sample_sup(EdgeNorm(system, edge), interval, samples);
}

double amplification_constant(const SwitchedSystem& system, const IntervalMap& intervals, int grid_points) {
    const auto reach = system.graph().reachability();
    const int k = system.vertex_count();
    double c = 0.0;
    for (Vertex s = 1; s <= k; ++s) {
        const auto outgoing = system.graph().out_edges(s);
        if (outgoing.empty()) continue;  // a signal that stops switching never reaches a sink
        double t_hi = 0.0;
        for (const auto& e : outgoing) {
            const auto it = intervals.find(e);
            if (it == intervals.end()) throw Error(ErrorCode::MissingInterval, "no interval for " + to_string(e));
            if (!std::isfinite(it->second.hi)) {
                throw Error(ErrorCode::UnboundedInterval, "interval for " + to_string(e) + " is unbounded");
            }
            t_hi = std::max(t_hi, it->second.hi);
        }
        double inv_norm = 0.0;
        for (Vertex r = 1; r <= k; ++r) {
            if (reach[index_of(r)][index_of(s)]) {
                inv_norm = std::max(inv_norm, spectral_norm(system.decomposition(r).P_inverse()));
            }
        }
        const auto& d = system.decomposition(s);
        auto sup_over = [&](int samples) {
            double sup = 0.0;
            for (int i = 0; i <= samples; ++i) {
                const double t = t_hi * static_cast<double>(i) / static_cast<double>(samples);
                sup = std::max(sup, spectral_norm(d.P() * exp_jordan(d.blocks(), t)));
            }
            return sup;
        };
        int samples = std::max(grid_points, 16);
        double sup = sup_over(samples);
        for (int round = 0; round < 4; ++round) {
            samples *= 2;
            const double refined = sup_over(samples);
            const bool stable = refined <= sup * 1.01;
            sup = std::max(sup, refined);
            if (stable) break;
        }
        c = std::max(c, inv_norm * sup);
    }
    return std::max(c, 1.0);
}

Certificate certify(const SwitchedSystem& system, const EtaMap& etas, const CertifyOptions& options) {
    check_options(options);
    const auto partition = partition_edges(system);

    std::vector<EdgeFailure> failures;
    std::vector<EdgeCondition> conditions;
    for (const auto& e : system.graph().edges()) {
        const auto it = etas.find(e);
        if (it == etas.end()) throw Error(ErrorCode::MissingInterval, "no eta for edge " + to_string(e));
        const double eta = it->second;
        if (!(eta > 0.0) || !(eta < options.t_max)) {
            throw Error(ErrorCode::InvalidArgument, "eta for " + to_string(e) + " must lie in (0, tMax)");
        }
        const EdgeNorm f(system, e);
        const double value = f(eta);
        if (!(value < 1.0)) {
            failures.push_back({e, eta, value});
            continue;
        }
        EdgeCondition c;
        c.edge = e;
        c.eta = eta;
        c.norm_value = value;
        c.interval = component_containing(f, eta, options);
        c.partition = partition.at(e);
        c.sup_norm = std::max(sample_sup(f, c.interval, options.grid_points), value);
        if (!(c.sup_norm < 1.0)) {
            failures.push_back({e, eta, c.sup_norm});
            continue;
        }
        conditions.push_back(c);
    }
    if (!failures.empty()) throw ConditionViolated(std::move(failures));

    Certificate cert;
    cert.conditions = std::move(conditions);
    cert.contraction_k = 0.0;
    for (const auto& c : cert.conditions) cert.contraction_k = std::max(cert.contraction_k, c.sup_norm);
    cert.amplification_c = amplification_constant(system, cert.intervals(), options.grid_points);
    return cert;
}

Certificate certify_with_intervals(const SwitchedSystem& system, const IntervalMap& intervals,
                                   const CertifyOptions& options) {
    check_options(options);
    const auto partition = partition_edges(system);

    std::vector<EdgeFailure> failures;
    std::vector<EdgeCondition> conditions;
    for (const auto& e : system.graph().edges()) {
        const auto it = intervals.find(e);
        if (it == intervals.end()) throw Error(ErrorCode::MissingInterval, "no interval for edge " + to_string(e));
        const Interval interval = it->second;
        if (!(interval.lo >= 0.0) || !(interval.hi > interval.lo)) {
            throw Error(ErrorCode::EmptyInterval, "interval for " + to_string(e) + " is empty or negative");
        }
        if (!std::isfinite(interval.hi)) {
            throw Error(ErrorCode::UnboundedInterval, "interval for " + to_string(e) + " must be bounded");
        }
        const EdgeNorm f(system, e);
        const int samples = std::max(options.grid_points, 2);
        double sup = 0.0;
        double best = std::numeric_limits<double>::infinity();
        double best_t = 0.5 * (interval.lo + interval.hi);
        double worst_t = best_t;
        for (int i = 0; i <= samples; ++i) {
            const double t = interval.lo + interval.width() * static_cast<double>(i) / static_cast<double>(samples);
            const double value = t > 0.0 ? f(t) : f.at_zero();
            if (value > sup) {
                sup = value;
                worst_t = t;
            }
            if (i > 0 && i < samples && value < best) {
                best = value;
                best_t = t;
            }
        }
        if (!(sup < 1.0)) {
            failures.push_back({e, worst_t, sup});
            continue;
        }
        conditions.push_back({e, best_t, best, interval, partition.at(e), sup});
    }
    if (!failures.empty()) throw ConditionViolated(std::move(failures));

    Certificate cert;
    cert.conditions = std::move(conditions);
    cert.contraction_k = 0.0;
    for (const auto& c : cert.conditions) cert.contraction_k = std::max(cert.contraction_k, c.sup_norm);
    cert.amplification_c = amplification_constant(system, cert.intervals(), options.grid_points);
    return cert;
}

std::vector<EnvelopePoint> decay_envelope(const Certificate& certificate, const SwitchingSignal& signal) {
    const auto intervals = certificate.intervals();
    double previous = 0.0;
    if (!signal.path.empty() && signal.switch_times.size() != signal.path.size() - 1) {
        throw Error(ErrorCode::SignalOutsideClass, "switch times do not match the path");
    }
    std::vector<EnvelopePoint> out;
    for (std::size_t n = 1; n <= signal.switch_count(); ++n) {
        const Edge e{signal.path[n - 1], signal.path[n]};
        const double dwell = signal.switch_times[n - 1] - previous;
        previous = signal.switch_times[n - 1];
        const auto it = intervals.find(e);
        if (it == intervals.end() || !it->second.contains(dwell)) {
            throw Error(ErrorCode::SignalOutsideClass,
                        "dwell " + std::to_string(dwell) + " on " + to_string(e) + " is outside the certified class");
        }
        out.push_back({n, certificate.amplification_c *
                              std::pow(certificate.contraction_k, static_cast<double>(n - 1))});
    }
    return out;
}

std::optional<double> budget_from_sums(double m, double n, double rate) {
    if (!(rate > 0.0)) return std::nullopt;
    return -(m + n) / rate;
}

std::vector<LoopBudget> loop_budgets(const SwitchedSystem& system, const IntervalMap& intervals,
                                     const CertifyOptions& options) {
    const auto partition = partition_edges(system);
    std::vector<LoopBudget> out;
    for (auto& loop : enumerate_simple_loops(system.graph())) {
        LoopBudget b;
        b.lambda_max = -std::numeric_limits<double>::infinity();
        for (const auto& e : path_edges(loop)) {
            if (partition.at(e) == EdgeClass::E2) {
                b.applicable = true;
                b.m += std::log(spectral_norm(system.transition(e)));
                const double lambda = system.decomposition(e.from).abscissa();
                b.lambda_max = std::max(b.lambda_max, lambda);
                b.gamma_sum += lambda;
            } else {
                const auto it = intervals.find(e);
                if (it == intervals.end()) {
                    throw Error(ErrorCode::MissingInterval, "no interval for E1 edge " + to_string(e));
                }
                b.n += std::log(interval_sup_norm(system, e, it->second, options.grid_points));
            }
        }
        if (b.applicable) {
            b.total_budget = budget_from_sums(b.m, b.n, b.lambda_max);
            b.per_edge_budget = budget_from_sums(b.m, b.n, b.gamma_sum);
        } else {
            b.lambda_max = 0.0;
        }
        b.loop = std::move(loop);
        out.push_back(std::move(b));
    }
    return out;
}

double stable_edge_lower_bound(const SwitchedSystem& system, Edge edge, double lambda_star) {
    const auto& d = system.decomposition(edge.from);
    const double abscissa = d.abscissa();
    if (!(abscissa < 0.0)) throw Error(ErrorCode::NotHurwitz, "source subsystem of " + to_string(edge) + " is not Hurwitz");
    if (!(lambda_star < 0.0) || !(lambda_star > abscissa)) {
        throw Error(ErrorCode::BadLambdaStar, "lambda_star must lie strictly between the abscissa and 0");
    }
    const double p_norm = spectral_norm(system.transition(edge));

    int largest_block = 1;
    for (const auto& b : d.blocks()) largest_block = std::max(largest_block, b.size);
    const double gap = lambda_star - abscissa;
    const double horizon = (40.0 + 2.0 * largest_block) / gap;
    auto weighted = [&](double t) { return spectral_norm(exp_jordan(d.blocks(), t)) * std::exp(-lambda_star * t); };

    constexpr int kSamples = 8192;
    double beta = weighted(0.0);
    int best_i = 0;
    for (int i = 1; i <= kSamples; ++i) {
        const double value = weighted(horizon * i / kSamples);
        if (value > beta) {
            beta = value;
            best_i = i;
        }
    }
    // golden-section polish around the best sample
    double a = horizon * std::max(best_i - 1, 0) / kSamples;
    double b = horizon * std::min(best_i + 1, kSamples) / kSamples;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int iter = 0; iter < 80; ++iter) {
        const double x1 = b - ratio * (b - a);
        const double x2 = a + ratio * (b - a);
        if (weighted(x1) > weighted(x2)) {
            b = x2;
        } else {
            a = x1;
        }
    }
    beta = std::max(beta, weighted(0.5 * (a + b)));
    return -std::log(beta * p_norm) / lambda_star;
}

}  // namespace dwellcert
