#include "dwellcert/graph.hpp"

#include "dwellcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace dwellcert {

std::string to_string(const Edge& e) {
    return "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
}

SwitchGraph::SwitchGraph(int vertex_count, std::vector<Edge> edges)
    : k_(vertex_count), edges_(std::move(edges)) {
    if (k_ < 1) throw Error(ErrorCode::InvalidGraph, "graph needs at least one vertex");
    std::set<Edge> seen;
    for (const auto& e : edges_) {
        if (!contains_vertex(e.from) || !contains_vertex(e.to)) {
            throw Error(ErrorCode::InvalidGraph, "edge " + to_string(e) + " references an unknown vertex");
        }
        if (e.from == e.to) {
            throw Error(ErrorCode::InvalidGraph, "self-loop " + to_string(e) + " is not allowed");
        }
        if (!seen.insert(e).second) {
            throw Error(ErrorCode::InvalidGraph, "duplicate edge " + to_string(e));
        }
    }
}

bool SwitchGraph::has_edge(Edge e) const {
    return std::find(edges_.begin(), edges_.end(), e) != edges_.end();
}

std::vector<Edge> SwitchGraph::out_edges(Vertex v) const {
    std::vector<Edge> out;
    for (const auto& e : edges_) {
        if (e.from == v) out.push_back(e);
    }
    return out;
}

std::vector<std::vector<bool>> SwitchGraph::reachability() const {
    const auto k = static_cast<std::size_t>(k_);
    std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i) reach[i][i] = true;
    for (const auto& e : edges_) {
        reach[static_cast<std::size_t>(e.from - 1)][static_cast<std::size_t>(e.to - 1)] = true;
    }
    // Floyd-Warshall closure
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t i = 0; i < k; ++i) {
            if (!reach[i][m]) continue;
            for (std::size_t j = 0; j < k; ++j) {
                if (reach[m][j]) reach[i][j] = true;
            }
        }
    }
    return reach;
}

SwitchGraph ring_graph(int k) {
    std::vector<Edge> edges;
    for (int v = 1; v <= k; ++v) edges.push_back({v, v % k + 1});
    return SwitchGraph(k, std::move(edges));
}

std::vector<Edge> path_edges(const VertexPath& path) {
    std::vector<Edge> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) out.push_back({path[i], path[i + 1]});
    return out;
}

bool is_loop(const VertexPath& path) { return path.size() >= 2 && path.front() == path.back(); }

PathDecomposition standard_decomposition(const VertexPath& path) {
    PathDecomposition out;
    VertexPath current = path;
    while (true) {
        // First position whose vertex already occurred; since nothing repeats
        // before it, the earlier occurrence is unique.
        std::size_t first = 0;
        std::size_t repeat = current.size();
        for (std::size_t j = 1; j < current.size() && repeat == current.size(); ++j) {
            for (std::size_t m = 0; m < j; ++m) {
                if (current[m] == current[j]) {
                    first = m;
                    repeat = j;
                    break;
                }
            }
        }
        if (repeat == current.size()) break;

        out.loops.emplace_back(current.begin() + static_cast<std::ptrdiff_t>(first),
                               current.begin() + static_cast<std::ptrdiff_t>(repeat) + 1);
        VertexPath next(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(first) + 1);
        next.insert(next.end(), current.begin() + static_cast<std::ptrdiff_t>(repeat) + 1, current.end());
        current = std::move(next);
    }
    out.remainder = std::move(current);
    return out;
}

std::vector<VertexPath> enumerate_simple_loops(const SwitchGraph& graph, std::size_t max_loops) {
    const int k = graph.vertex_count();
    if (k > 20) throw Error(ErrorCode::InvalidArgument, "loop enumeration supports at most 20 vertices");

    std::vector<std::vector<Vertex>> adjacency(static_cast<std::size_t>(k) + 1);
    for (const auto& e : graph.edges()) adjacency[static_cast<std::size_t>(e.from)].push_back(e.to);
    for (auto& list : adjacency) std::sort(list.begin(), list.end());

    std::vector<VertexPath> loops;
    std::vector<bool> on_path(static_cast<std::size_t>(k) + 1, false);
    VertexPath stack;

    // Cycles through `start` using only vertices > start, so each cycle is found
    // exactly once, already rotated to its smallest vertex.
    auto dfs = [&](auto&& self, Vertex start, Vertex v) -> void {
        for (const Vertex w : adjacency[static_cast<std::size_t>(v)]) {
            if (w == start) {
                VertexPath loop = stack;
                loop.push_back(start);
                loops.push_back(std::move(loop));
                if (loops.size() > max_loops) {
                    throw Error(ErrorCode::TooManyLoops,
                                "more than " + std::to_string(max_loops) + " simple loops");
                }
            } else if (w > start && !on_path[static_cast<std::size_t>(w)]) {
                on_path[static_cast<std::size_t>(w)] = true;
                stack.push_back(w);
                self(self, start, w);
                stack.pop_back();
                on_path[static_cast<std::size_t>(w)] = false;
            }
        }
    };

    for (Vertex s = 1; s <= k; ++s) {
        stack = {s};
        on_path[static_cast<std::size_t>(s)] = true;
        dfs(dfs, s, s);
        on_path[static_cast<std::size_t>(s)] = false;
    }
    std::sort(loops.begin(), loops.end());
    return loops;
}

bool is_acyclic(const SwitchGraph& graph) {
    const auto k = static_cast<std::size_t>(graph.vertex_count());
    std::vector<int> indegree(k + 1, 0);
    for (const auto& e : graph.edges()) ++indegree[static_cast<std::size_t>(e.to)];
    std::deque<Vertex> ready;
    for (std::size_t v = 1; v <= k; ++v) {
        if (indegree[v] == 0) ready.push_back(static_cast<Vertex>(v));
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
        const Vertex v = ready.front();
        ready.pop_front();
        ++removed;
        for (const auto& e : graph.out_edges(v)) {
            if (--indegree[static_cast<std::size_t>(e.to)] == 0) ready.push_back(e.to);
        }
    }
    return removed == k;
}

double SwitchingSignal::dwell(std::size_t n) const {
    if (n < 1 || n > switch_times.size()) throw Error(ErrorCode::InvalidArgument, "dwell index out of range");
    return switch_times[n - 1] - (n >= 2 ? switch_times[n - 2] : 0.0);
}

SwitchingSignal signal_from_dwells(VertexPath path, const std::vector<double>& dwells) {
    SwitchingSignal s{std::move(path), {}};
    double t = 0.0;
    for (double d : dwells) {
        t += d;
        s.switch_times.push_back(t);
    }
    return s;
}

std::vector<SignalViolation> validate_signal(const SwitchingSignal& signal, const SwitchGraph& graph) {
    std::vector<SignalViolation> report;
    const auto& path = signal.path;
    if (path.empty()) {
        if (!signal.switch_times.empty()) {
            report.push_back({ViolationKind::CountMismatch, 0, "switch times given for an empty path"});
        }
        return report;
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!graph.contains_vertex(path[i])) {
            report.push_back({ViolationKind::UnknownVertex, i, "vertex " + std::to_string(path[i]) + " is not in the graph"});
        }
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Edge e{path[i], path[i + 1]};
        if (!graph.has_edge(e)) {
            report.push_back({ViolationKind::NonEdge, i, "pair " + to_string(e) + " is not an edge"});
        }
    }
    if (signal.switch_times.size() != path.size() - 1) {
        report.push_back({ViolationKind::CountMismatch, signal.switch_times.size(),
                          "expected " + std::to_string(path.size() - 1) + " switch times, got " +
                              std::to_string(signal.switch_times.size())});
    }
    double previous = 0.0;
    for (std::size_t i = 0; i < signal.switch_times.size(); ++i) {
        const double t = signal.switch_times[i];
        if (!std::isfinite(t) || t <= previous) {
            report.push_back({i == 0 ? ViolationKind::NonPositiveTime : ViolationKind::NonIncreasingTime, i,
                              "switch time " + std::to_string(t) + " does not exceed " + std::to_string(previous)});
        }
        if (std::isfinite(t)) previous = std::max(previous, t);
    }
    return report;
}

namespace {

void require_admissible(const SwitchingSignal& signal, const SwitchGraph& graph) {
    const auto report = validate_signal(signal, graph);
    if (!report.empty()) throw Error(ErrorCode::InadmissibleSignal, report.front().detail);
}

}  // namespace

EdgeOccupancy edge_occupancy(const SwitchingSignal& signal, const SwitchGraph& graph) {
    require_admissible(signal, graph);
    EdgeOccupancy occupancy;
    for (std::size_t n = 1; n <= signal.switch_count(); ++n) {
        occupancy[Edge{signal.path[n - 1], signal.path[n]}].push_back(signal.dwell(n));
    }
    return occupancy;
}

bool in_signal_class(const SwitchingSignal& signal, const SwitchGraph& graph, const IntervalMap& intervals) {
    for (const auto& e : graph.edges()) {
        if (!intervals.contains(e)) throw Error(ErrorCode::MissingInterval, "no interval for edge " + to_string(e));
    }
    for (const auto& [edge, dwells] : edge_occupancy(signal, graph)) {
        const auto& interval = intervals.at(edge);
        for (double d : dwells) {
            if (!interval.contains(d)) return false;
        }
    }
    return true;
}

SwitchingSignal periodic_signal(const VertexPath& cycle, const std::vector<double>& dwells, int repetitions) {
    if (!is_loop(cycle)) throw Error(ErrorCode::NotALoop, "periodic signals need a closed loop");
    if (dwells.size() != cycle.size() - 1) {
        throw Error(ErrorCode::InvalidArgument, "need one dwell per loop edge");
    }
    if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
    for (double d : dwells) {
        if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorCode::InvalidArgument, "dwells must be positive");
    }
    VertexPath path{cycle.front()};
    std::vector<double> all_dwells;
    for (int r = 0; r < repetitions; ++r) {
        path.insert(path.end(), cycle.begin() + 1, cycle.end());
        all_dwells.insert(all_dwells.end(), dwells.begin(), dwells.end());
    }
    return signal_from_dwells(std::move(path), all_dwells);
}

}  // namespace dwellcert
