#include "dwellcert/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace dwellcert {

namespace {

using Point = std::vector<double>;

// Column -> block index for each vertex, so that one free parameter drives all
// columns of a complex or defective block.
struct BlockLayout {
    std::vector<std::vector<int>> column_block;  // per vertex
    std::vector<int> block_count;                // per vertex
};

BlockLayout layout_of(const SwitchedSystem& system) {
    BlockLayout layout;
    for (const auto& d : system.decompositions()) {
        std::vector<int> cols;
        int b = 0;
        for (const auto& block : d.blocks()) {
            for (int i = 0; i < block.size; ++i) cols.push_back(b);
            ++b;
        }
        layout.column_block.push_back(std::move(cols));
        layout.block_count.push_back(b);
    }
    return layout;
}

void check_block_constant(const SwitchedSystem& system, const ScalingAssignment& a) {
    const auto layout = layout_of(system);
    for (std::size_t v = 0; v < layout.column_block.size(); ++v) {
        const auto& cols = layout.column_block[v];
        for (std::size_t j = 1; j < cols.size(); ++j) {
            if (cols[j] == cols[j - 1] && a.log_diagonals[v](static_cast<Eigen::Index>(j)) !=
                                              a.log_diagonals[v](static_cast<Eigen::Index>(j - 1))) {
                throw Error(ErrorCode::InvalidArgument,
                            "log-diagonal entries must agree within a complex or defective block");
            }
        }
    }
}

void check_dimensions(const SwitchedSystem& system, const ScalingAssignment& a) {
    if (a.log_diagonals.size() != static_cast<std::size_t>(system.vertex_count())) {
        throw Error(ErrorCode::DimensionMismatch, "need one log-diagonal per vertex");
    }
    for (const auto& d : a.log_diagonals) {
        if (d.size() != system.dimension() || !d.allFinite()) {
            throw Error(ErrorCode::DimensionMismatch, "log-diagonal length must equal the system dimension");
        }
    }
    for (const auto& e : system.graph().edges()) {
        const auto it = a.etas.find(e);
        if (it == a.etas.end()) throw Error(ErrorCode::DimensionMismatch, "no eta for edge " + to_string(e));
        if (!(it->second > 0.0) || !std::isfinite(it->second)) {
            throw Error(ErrorCode::InvalidArgument, "etas must be positive");
        }
    }
}

// Precomputed per-edge data for fast objective evaluation.
struct EdgeTerm {
    Edge edge;
    Matrix transition;
    const std::vector<JordanBlock>* blocks;
};

double objective_from_terms(const std::vector<EdgeTerm>& terms, const std::vector<Vector>& log_diag,
                            const std::vector<double>& etas) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const Vector& dr = log_diag[static_cast<std::size_t>(t.edge.from - 1)];
        const Vector& ds = log_diag[static_cast<std::size_t>(t.edge.to - 1)];
        const Matrix scaled = (-ds.array()).exp().matrix().asDiagonal() * t.transition *
                              dr.array().exp().matrix().asDiagonal() * exp_jordan(*t.blocks, etas[i]);
        worst = std::max(worst, std::log(spectral_norm(scaled)));
    }
    return worst;
}

// Nelder-Mead on a box, evaluating at the clamped point. Restarts the simplex
// around the incumbent when it collapses and budget remains.
struct NelderMead {
    std::function<double(const Point&)> f;
    std::function<Point(Point)> clamp;
    int max_iterations;

    std::pair<Point, double> minimize(Point start, double step) const {
        const std::size_t m = start.size();
        Point best = clamp(std::move(start));
        double best_value = f(best);
        if (m == 0) return {best, best_value};

        int iterations = 0;
        double current_step = step;
        for (int rebuild = 0; rebuild < 4 && iterations < max_iterations; ++rebuild) {
            std::vector<Point> simplex{best};
            std::vector<double> values{best_value};
            for (std::size_t i = 0; i < m; ++i) {
                Point p = best;
                p[i] += current_step;
                Point clamped = clamp(p);
                if (clamped[i] == best[i]) {
                    p[i] = best[i] - current_step;
                    clamped = clamp(p);
                }
                values.push_back(f(clamped));
                simplex.push_back(std::move(clamped));
            }

            std::vector<std::size_t> order(m + 1);
            while (iterations < max_iterations) {
                ++iterations;
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
                const std::size_t lo = order.front();
                const std::size_t hi = order.back();
                const std::size_t second = order[m - 1];

                double diameter = 0.0;
                for (std::size_t i = 0; i <= m; ++i) {
                    for (std::size_t j = 0; j < m; ++j) {
                        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[lo][j]));
                    }
                }
                if (diameter < 1e-10 || values[hi] - values[lo] < 1e-13) break;

                Point centroid(m, 0.0);
                for (std::size_t i = 0; i <= m; ++i) {
                    if (i == hi) continue;
                    for (std::size_t j = 0; j < m; ++j) centroid[j] += simplex[i][j] / static_cast<double>(m);
                }
                auto along = [&](double coeff) {
                    Point p(m);
                    for (std::size_t j = 0; j < m; ++j) p[j] = centroid[j] + coeff * (simplex[hi][j] - centroid[j]);
                    return clamp(std::move(p));
                };

                Point reflected = along(-1.0);
                const double fr = f(reflected);
                if (fr < values[lo]) {
                    Point expanded = along(-2.0);
                    const double fe = f(expanded);
                    if (fe < fr) {
                        simplex[hi] = std::move(expanded);
                        values[hi] = fe;
                    } else {
                        simplex[hi] = std::move(reflected);
                        values[hi] = fr;
                    }
                } else if (fr < values[second]) {
                    simplex[hi] = std::move(reflected);
                    values[hi] = fr;
                } else {
                    const bool outside = fr < values[hi];
                    Point contracted = along(outside ? -0.5 : 0.5);
                    const double fc = f(contracted);
                    if (fc < std::min(fr, values[hi])) {
                        simplex[hi] = std::move(contracted);
                        values[hi] = fc;
                    } else {
                        for (std::size_t i = 0; i <= m; ++i) {
                            if (i == lo) continue;
                            Point p(m);
                            for (std::size_t j = 0; j < m; ++j) p[j] = simplex[lo][j] + 0.5 * (simplex[i][j] - simplex[lo][j]);
                            simplex[i] = clamp(std::move(p));
                            values[i] = f(simplex[i]);
                        }
                    }
                }
            }
            const auto lo = static_cast<std::size_t>(
                std::min_element(values.begin(), values.end()) - values.begin());
            if (values[lo] < best_value) {
                best_value = values[lo];
                best = simplex[lo];
            }
            current_step *= 0.5;
        }
        return {best, best_value};
    }
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

const char* to_string(SearchStatus s) noexcept {
    return s == SearchStatus::Feasible ? "feasible" : "infeasible-within-budget";
}

ScalingAssignment identity_assignment(const SwitchedSystem& system, double eta) {
    ScalingAssignment a;
    a.log_diagonals.assign(static_cast<std::size_t>(system.vertex_count()), Vector::Zero(system.dimension()));
    for (const auto& e : system.graph().edges()) a.etas[e] = eta;
    return a;
}

SwitchedSystem normalized(const SwitchedSystem& system) {
    std::vector<SpectralDecomposition> decompositions;
    for (const auto& d : system.decompositions()) {
        decompositions.push_back(normalize_columns(d, std::max(kDefaultReconstructionTolerance,
                                                               2.0 * d.reconstruction_residual())));
    }
    return SwitchedSystem(system.graph(), system.subsystems(), std::move(decompositions));
}

double scaled_objective(const SwitchedSystem& system, const ScalingAssignment& assignment) {
    check_dimensions(system, assignment);
    std::vector<EdgeTerm> terms;
    std::vector<double> etas;
    for (const auto& e : system.graph().edges()) {
        terms.push_back({e, system.transition(e), &system.decomposition(e.from).blocks()});
        etas.push_back(assignment.etas.at(e));
    }
    return objective_from_terms(terms, assignment.log_diagonals, etas);
}

SwitchedSystem fold(const SwitchedSystem& system, const ScalingAssignment& assignment) {
    check_dimensions(system, assignment);
    check_block_constant(system, assignment);
    if (!(scaled_objective(system, assignment) < 0.0)) {
        throw Error(ErrorCode::InfeasibleAssignment, "assignment does not satisfy the scaled norm conditions");
    }
    std::vector<SpectralDecomposition> decompositions;
    for (int v = 1; v <= system.vertex_count(); ++v) {
        const auto& d = system.decomposition(v);
        const Vector scale = assignment.log_diagonals[static_cast<std::size_t>(v - 1)].array().exp();
        const Matrix p = d.P() * scale.asDiagonal();
        decompositions.push_back(decomposition_from_parts(
            p, d.blocks(), d.source(), std::max(kDefaultReconstructionTolerance, 2.0 * d.reconstruction_residual())));
    }
    return SwitchedSystem(system.graph(), system.subsystems(), std::move(decompositions));
}

SearchResult search(const SwitchedSystem& system, const SearchConfig& config) {
    if (config.restarts < 1 || config.max_iterations < 1 || !(config.margin > 0.0) ||
        !(config.eta_range.lo > 0.0) || !(config.eta_range.hi > config.eta_range.lo) ||
        !(config.log_diag_range > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid search configuration");
    }
    const SwitchedSystem base = normalized(system);
    const auto layout = layout_of(base);
    const auto& edges = base.graph().edges();
    const int n = base.dimension();

    std::vector<EdgeTerm> terms;
    for (const auto& e : edges) terms.push_back({e, base.transition(e), &base.decomposition(e.from).blocks()});

    // Parameter vector: free block log-scales (vertex 1 skips its first block),
    // then one log-eta per edge.
    std::vector<std::pair<std::size_t, int>> block_params;  // (vertex index, block)
    for (std::size_t v = 0; v < layout.block_count.size(); ++v) {
        for (int b = (v == 0 ? 1 : 0); b < layout.block_count[v]; ++b) block_params.emplace_back(v, b);
    }
    const std::size_t n_blocks = block_params.size();
    const std::size_t n_params = n_blocks + edges.size();
    const double log_eta_lo = std::log(config.eta_range.lo);
    const double log_eta_hi = std::log(config.eta_range.hi);

    auto clamp = [&](Point p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = i < n_blocks ? std::clamp(p[i], -config.log_diag_range, config.log_diag_range)
                                : std::clamp(p[i], log_eta_lo, log_eta_hi);
        }
        return p;
    };
    auto unpack = [&](const Point& p) {
        ScalingAssignment a;
        a.log_diagonals.assign(layout.block_count.size(), Vector::Zero(n));
        for (std::size_t i = 0; i < n_blocks; ++i) {
            const auto [v, b] = block_params[i];
            for (int c = 0; c < n; ++c) {
                if (layout.column_block[v][static_cast<std::size_t>(c)] == b) a.log_diagonals[v](c) = p[i];
            }
        }
        for (std::size_t e = 0; e < edges.size(); ++e) a.etas[edges[e]] = std::exp(p[n_blocks + e]);
        return a;
    };
    auto objective = [&](const Point& p) {
        const auto a = unpack(p);
        std::vector<double> etas;
        for (const auto& e : edges) etas.push_back(a.etas.at(e));
        const double value = objective_from_terms(terms, a.log_diagonals, etas);
        return std::isfinite(value) ? value : std::numeric_limits<double>::max();
    };

    // Unscaled per-edge argmin of the edge norm on a log grid; the first start.
    Point heuristic_log_eta;
    for (const auto& term : terms) {
        double best_t = 0.0;
        double best_v = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 64; ++i) {
            const double lt = log_eta_lo + (log_eta_hi - log_eta_lo) * i / 64.0;
            const double v = spectral_norm(term.transition * exp_jordan(*term.blocks, std::exp(lt)));
            if (v < best_v) {
                best_v = v;
                best_t = lt;
            }
        }
        heuristic_log_eta.push_back(best_t);
    }

    const NelderMead optimizer{objective, clamp, config.max_iterations};
    SearchResult result;
    Point best_point;
    double best_value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed & 0xffffffffu),
                          static_cast<std::uint32_t>(config.seed >> 32), static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);

        Point start(n_params, 0.0);
        if (r == 0) {
            std::copy(heuristic_log_eta.begin(), heuristic_log_eta.end(), start.begin() + static_cast<std::ptrdiff_t>(n_blocks));
        } else if (r == 1) {
            // D = I, eta = 1
        } else if (r == 2) {
            for (std::size_t i = 0; i < n_blocks; ++i) start[i] = (uniform01(rng) - 0.5) * 4.0;
            std::copy(heuristic_log_eta.begin(), heuristic_log_eta.end(), start.begin() + static_cast<std::ptrdiff_t>(n_blocks));
        } else {
            for (std::size_t i = 0; i < n_blocks; ++i) {
                start[i] = (2.0 * uniform01(rng) - 1.0) * config.log_diag_range * 0.5;
            }
            for (std::size_t e = 0; e < edges.size(); ++e) {
                start[n_blocks + e] = log_eta_lo + (log_eta_hi - log_eta_lo) * uniform01(rng);
            }
        }
        auto [point, value] = optimizer.minimize(std::move(start), 1.0);
        result.trace.push_back(value);
        if (value < best_value) {
            best_value = value;
            best_point = std::move(point);
        }
    }

    result.objective = best_value;
    if (std::isfinite(best_value) && best_value < std::numeric_limits<double>::max()) {
        result.assignment = unpack(best_point);
    }
    if (best_value <= -config.margin && result.assignment) {
        result.status = SearchStatus::Feasible;
        result.folded = fold(base, *result.assignment);
    }
    return result;
}

}  // namespace dwellcert
