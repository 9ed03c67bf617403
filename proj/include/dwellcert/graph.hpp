#pragma once

// Switching graphs, admissible signals and the standard decomposition of
// paths into simple loops. Vertices are labelled 1..k throughout.

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace dwellcert {

using Vertex = int;

struct Edge {
    Vertex from = 0;
    Vertex to = 0;

    auto operator<=>(const Edge&) const = default;
};

std::string to_string(const Edge& e);

/// An open interval (lo, hi) of dwell times.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const noexcept { return lo < x && x < hi; }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

class SwitchGraph {
public:
    /// Throws InvalidGraph on self-loops, duplicate edges or out-of-range labels.
    SwitchGraph(int vertex_count, std::vector<Edge> edges);

    [[nodiscard]] int vertex_count() const noexcept { return k_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] bool has_edge(Edge e) const;
    [[nodiscard]] std::vector<Edge> out_edges(Vertex v) const;
    [[nodiscard]] bool contains_vertex(Vertex v) const noexcept { return v >= 1 && v <= k_; }

    /// reach[r-1][s-1] is true when a path (possibly of length zero) leads from r to s.
    [[nodiscard]] std::vector<std::vector<bool>> reachability() const;

private:
    int k_;
    std::vector<Edge> edges_;
};

/// Ring 1 -> 2 -> ... -> k -> 1.
[[nodiscard]] SwitchGraph ring_graph(int k);

using VertexPath = std::vector<Vertex>;

[[nodiscard]] std::vector<Edge> path_edges(const VertexPath& path);

struct PathDecomposition {
    std::vector<VertexPath> loops;  // extraction order
    VertexPath remainder;

    bool operator==(const PathDecomposition&) const = default;
};

/// Repeatedly cuts out the first closed sub-path (first vertex repetition)
/// until none is left.
[[nodiscard]] PathDecomposition standard_decomposition(const VertexPath& path);

/// All simple directed cycles, each closed (first == last) and rotated to start
/// at its smallest vertex, sorted lexicographically. Throws TooManyLoops.
[[nodiscard]] std::vector<VertexPath> enumerate_simple_loops(const SwitchGraph& graph,
                                                             std::size_t max_loops = 100000);

/// Kahn topological sort.
[[nodiscard]] bool is_acyclic(const SwitchGraph& graph);

[[nodiscard]] bool is_loop(const VertexPath& path);

/// Piecewise-constant signal: path[n] is active on [t_n, t_{n+1}) with t_0 = 0
/// and t_n = switch_times[n-1]. The dwell in the last vertex is open-ended, so
/// switch_times.size() == path.size() - 1.
struct SwitchingSignal {
    VertexPath path;
    std::vector<double> switch_times;

    [[nodiscard]] std::size_t switch_count() const noexcept { return switch_times.size(); }
    /// Duration spent before the n-th switch (n is 1-based).
    [[nodiscard]] double dwell(std::size_t n) const;
};

/// Builds a signal whose switching times are the running sums of `dwells`.
[[nodiscard]] SwitchingSignal signal_from_dwells(VertexPath path, const std::vector<double>& dwells);

enum class ViolationKind { NonEdge, NonIncreasingTime, NonPositiveTime, CountMismatch, UnknownVertex };

struct SignalViolation {
    ViolationKind kind;
    std::size_t index;  // position in path or switch_times
    std::string detail;
};

/// Empty result means the signal is admissible on `graph`.
[[nodiscard]] std::vector<SignalViolation> validate_signal(const SwitchingSignal& signal,
                                                           const SwitchGraph& graph);

using EdgeOccupancy = std::map<Edge, std::vector<double>>;

[[nodiscard]] EdgeOccupancy edge_occupancy(const SwitchingSignal& signal, const SwitchGraph& graph);

using IntervalMap = std::map<Edge, Interval>;

/// True when every dwell before a switch lies strictly inside its edge's interval.
[[nodiscard]] bool in_signal_class(const SwitchingSignal& signal, const SwitchGraph& graph,
                                   const IntervalMap& intervals);

[[nodiscard]] SwitchingSignal periodic_signal(const VertexPath& cycle, const std::vector<double>& dwells,
                                              int repetitions);

}  // namespace dwellcert
