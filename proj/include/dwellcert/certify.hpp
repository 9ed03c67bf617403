#pragma once

// Per-edge norm conditions ||P_s^-1 P_r e^{t J_r}|| < 1, feasible dwell
// intervals, necessary-condition checks, loop time budgets and the assembled
// stability certificate with its decay constants K and C.

#include "dwellcert/error.hpp"
#include "dwellcert/graph.hpp"
#include "dwellcert/matrixcore.hpp"

#include <map>
#include <optional>
#include <vector>

namespace dwellcert {

class SwitchedSystem {
public:
    /// One subsystem matrix and one decomposition per vertex, common dimension.
    SwitchedSystem(SwitchGraph graph, std::vector<Matrix> subsystems,
                   std::vector<SpectralDecomposition> decompositions);

    /// Decomposes every subsystem with real_jordan (may throw NearDefective).
    static SwitchedSystem with_computed_decompositions(SwitchGraph graph, std::vector<Matrix> subsystems);

    [[nodiscard]] const SwitchGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] int dimension() const noexcept { return n_; }
    [[nodiscard]] int vertex_count() const noexcept { return graph_.vertex_count(); }
    [[nodiscard]] const Matrix& subsystem(Vertex v) const;
    [[nodiscard]] const SpectralDecomposition& decomposition(Vertex v) const;
    [[nodiscard]] const std::vector<Matrix>& subsystems() const noexcept { return subsystems_; }
    [[nodiscard]] const std::vector<SpectralDecomposition>& decompositions() const noexcept {
        return decompositions_;
    }

    /// P_(r,s) = P_s^-1 P_r. Throws NotAnEdge.
    [[nodiscard]] Matrix transition(Edge e) const;

private:
    SwitchGraph graph_;
    std::vector<Matrix> subsystems_;
    std::vector<SpectralDecomposition> decompositions_;
    int n_ = 0;
};

/// t -> ||P_(r,s) e^{t J_r}|| for one edge, with P_(r,s) precomputed.
class EdgeNorm {
public:
    EdgeNorm(const SwitchedSystem& system, Edge edge);

    double operator()(double t) const;
    [[nodiscard]] Edge edge() const noexcept { return edge_; }
    /// Limit as t -> 0+, i.e. ||P_(r,s)||.
    [[nodiscard]] double at_zero() const noexcept { return transition_norm_; }

private:
    Edge edge_;
    Matrix transition_;
    std::vector<JordanBlock> blocks_;
    double transition_norm_;
};

[[nodiscard]] double edge_norm(const SwitchedSystem& system, Edge edge, double t);

struct CertifyOptions {
    double t_max = 50.0;
    int grid_points = 2048;
    double refine_tol = 1e-9;
};

/// Maximal sub-intervals of (0, t_max] where the edge norm is below one. Each
/// endpoint is bisected to `refine_tol` and reported on the feasible side.
[[nodiscard]] std::vector<Interval> feasible_interval(const SwitchedSystem& system, Edge edge,
                                                      double t_max = 50.0, int grid_points = 2048,
                                                      double refine_tol = 1e-9);

/// -ln||P_(r,s)|| / lambda_r for an E2 edge whose source has only size-1 real
/// blocks and lambda_r > 0; every t below it keeps the edge norm under one.
[[nodiscard]] std::optional<double> analytic_e2_endpoint(const SwitchedSystem& system, Edge edge);

enum class EdgeClass { E1, E2 };

[[nodiscard]] const char* to_string(EdgeClass c) noexcept;

/// Values within this distance below 1 still count as ||P_(r,s)|| >= 1 so that
/// identical P's (norm 1 up to rounding) land in E1.
inline constexpr double kPartitionTolerance = 1e-12;

[[nodiscard]] std::map<Edge, EdgeClass> partition_edges(const SwitchedSystem& system);

struct SingularValueFlag {
    Edge edge;
    double smallest_singular_value;  // of e^{J_r}
};

struct TraceFlag {
    VertexPath loop;
    std::vector<double> traces;
};

struct NecessaryReport {
    std::vector<SingularValueFlag> singular_value_flags;
    bool trace_check_applicable = false;  // planar systems only
    std::vector<TraceFlag> trace_flags;

    /// No obstruction found. This is not a feasibility guarantee.
    [[nodiscard]] bool clean() const noexcept { return singular_value_flags.empty() && trace_flags.empty(); }
};

[[nodiscard]] NecessaryReport necessary_checks(const SwitchedSystem& system);

struct EdgeCondition {
    Edge edge;
    double eta = 0.0;
    double norm_value = 0.0;  // at eta
    Interval interval;
    EdgeClass partition = EdgeClass::E1;
    double sup_norm = 0.0;  // over the closure of `interval`
};

struct Certificate {
    std::vector<EdgeCondition> conditions;
    double contraction_k = 1.0;
    double amplification_c = 1.0;

    [[nodiscard]] IntervalMap intervals() const;
};

struct EdgeFailure {
    Edge edge;
    double t;
    double norm;
};

class ConditionViolated : public Error {
public:
    explicit ConditionViolated(std::vector<EdgeFailure> failures);

    [[nodiscard]] const std::vector<EdgeFailure>& failures() const noexcept { return failures_; }

private:
    std::vector<EdgeFailure> failures_;
};

using EtaMap = std::map<Edge, double>;

/// Checks the norm condition at each eta, then stores the feasible component
/// around each eta and derives K and C from the stored intervals.
[[nodiscard]] Certificate certify(const SwitchedSystem& system, const EtaMap& etas,
                                  const CertifyOptions& options = {});

/// Certificate for caller-chosen bounded intervals; fails if any sampled point
/// of an interval's closure has edge norm >= 1.
[[nodiscard]] Certificate certify_with_intervals(const SwitchedSystem& system, const IntervalMap& intervals,
                                                 const CertifyOptions& options = {});

/// sup over sampled t of the edge norm on the closure of `interval`.
[[nodiscard]] double interval_sup_norm(const SwitchedSystem& system, Edge edge, Interval interval,
                                       int samples = 2048);

/// sup ||P_s e^{t J_s}|| * ||P_r^-1|| over vertices r that reach s and elapsed
/// times t in [0, max outgoing hi at s]. Refined by doubling until stable to 1%.
[[nodiscard]] double amplification_constant(const SwitchedSystem& system, const IntervalMap& intervals,
                                            int grid_points = 2048);

struct EnvelopePoint {
    std::size_t n;  // switch index, 1-based
    double bound;   // C * K^(n-1), relative to ||x(0)||
};

[[nodiscard]] std::vector<EnvelopePoint> decay_envelope(const Certificate& certificate,
                                                        const SwitchingSignal& signal);

struct LoopBudget {
    VertexPath loop;
    bool applicable = false;  // loop has at least one E2 edge
    double m = 0.0;           // sum of ln||P_(r,s)|| over E2 edges
    double n = 0.0;           // sum of ln K_(r,s) over E1 edges
    double lambda_max = 0.0;  // max source abscissa over E2 edges
    double gamma_sum = 0.0;   // sum of source abscissas over E2 edges
    std::optional<double> total_budget;     // nullopt: unbounded
    std::optional<double> per_edge_budget;  // nullopt: unbounded
};

/// -(m + n) / rate when rate > 0, unbounded otherwise.
[[nodiscard]] std::optional<double> budget_from_sums(double m, double n, double rate);

/// Budgets for every simple loop. E1 edges need an interval (MissingInterval).
[[nodiscard]] std::vector<LoopBudget> loop_budgets(const SwitchedSystem& system, const IntervalMap& intervals,
                                                   const CertifyOptions& options = {});

/// -ln(beta ||P_(r,s)||) / lambda_star with beta = sup_t ||e^{t J_r}|| e^{-lambda_star t}.
[[nodiscard]] double stable_edge_lower_bound(const SwitchedSystem& system, Edge edge, double lambda_star);

}  // namespace dwellcert
