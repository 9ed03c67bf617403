#include "dwellcert/planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dwellcert {

namespace {

void require_2x2(const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorCode::WrongDimension, "expected a 2x2 matrix");
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
}

void require_times(double t0, double s0) {
    if (!(t0 > 0.0) || !(s0 > 0.0) || !std::isfinite(t0) || !std::isfinite(s0)) {
        throw Error(ErrorCode::InvalidArgument, "t0 and s0 must be positive");
    }
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

bool schur_stable_2x2(const Matrix& m) {
    require_2x2(m);
    const double tr = m.trace();
    const double det = m.determinant();
    return std::abs(tr) < 1.0 + det && std::abs(det) < 1.0;
}

bool norm_lt_one_2x2(const Matrix& m) {
    require_2x2(m);
    return schur_stable_2x2(m.transpose() * m);
}

void PlanarPair::validate() const {
    if (!(alpha1 > 0.0) || !(beta1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha1 and beta1 must be positive");
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2) || !std::isfinite(beta1) || !std::isfinite(beta2)) {
        throw Error(ErrorCode::NonFinite, "planar exponents must be finite");
    }
    require_2x2(a);
    if (a.determinant() == 0.0) throw Error(ErrorCode::InvalidArgument, "a must be invertible");
    if (p == 0.0 || q == 0.0 || r == 0.0 || s == 0.0 || !std::isfinite(p * q * r * s)) {
        throw Error(ErrorCode::DegenerateScaling, "p, q, r, s must be non-zero");
    }
}

TDValues td_values(const PlanarPair& pair, double t0, double s0) {
    pair.validate();
    require_times(t0, s0);
    const auto& a = pair.a;
    const double a11 = a(0, 0), a12 = a(0, 1), a21 = a(1, 0), a22 = a(1, 1);
    const double p = pair.p, q = pair.q, r = pair.r, s = pair.s;
    const double scaled_det = p * q / (r * s) * (a11 * a22 - a12 * a21);
    const double sd2 = scaled_det * scaled_det;

    TDValues v;
    v.t1 = std::exp(-2.0 * pair.alpha1 * t0) * p * p * (a11 * a11 / (r * r) + a21 * a21 / (s * s)) +
           std::exp(2.0 * pair.alpha2 * t0) * q * q * (a12 * a12 / (r * r) + a22 * a22 / (s * s));
    v.d1 = std::exp(2.0 * (pair.alpha2 - pair.alpha1) * t0) * sd2;
    v.t2 = (std::exp(-2.0 * pair.beta1 * s0) / (s * s) * ((a21 * p) * (a21 * p) + (a22 * q) * (a22 * q)) +
            std::exp(2.0 * pair.beta2 * s0) / (r * r) * ((a11 * p) * (a11 * p) + (a12 * q) * (a12 * q))) /
           sd2;
    v.d2 = std::exp(2.0 * (pair.beta2 - pair.beta1) * s0) / sd2;
    return v;
}

std::pair<Matrix, Matrix> planar_edge_matrices(const PlanarPair& pair, double t0, double s0) {
    pair.validate();
    require_times(t0, s0);
    const Eigen::Vector2d d1(pair.p, pair.q);
    const Eigen::Vector2d d2(pair.r, pair.s);
    const Eigen::Vector2d e1(std::exp(-pair.alpha1 * t0), std::exp(pair.alpha2 * t0));
    const Eigen::Vector2d e2(std::exp(-pair.beta1 * s0), std::exp(pair.beta2 * s0));
    Matrix m1 = d2.cwiseInverse().asDiagonal() * pair.a * d1.asDiagonal() * e1.asDiagonal();
    Matrix m2 = d1.cwiseInverse().asDiagonal() * pair.a.inverse() * d2.asDiagonal() * e2.asDiagonal();
    return {std::move(m1), std::move(m2)};
}

bool planar_feasible_at(const PlanarPair& pair, double t0, double s0) {
    const auto v = td_values(pair, t0, s0);
    return v.t1 < 1.0 + v.d1 && v.d1 < 1.0 && v.t2 < 1.0 + v.d2 && v.d2 < 1.0;
}

bool frobenius_sufficient_at(const PlanarPair& pair, double t0, double s0) {
    const auto v = td_values(pair, t0, s0);
    return v.t1 < 1.0 && v.t2 < 1.0;
}

std::optional<Interval> RegionGrid::both_t_extent() const {
    std::optional<Interval> out;
    for (std::size_t ti = 0; ti < t_values.size(); ++ti) {
        if (!both_at(ti)) continue;
        if (!out) out = Interval{t_values[ti], t_values[ti]};
        out->hi = t_values[ti];
    }
    return out;
}

bool RegionGrid::both_at(std::size_t ti) const {
    for (std::size_t xi = 0; xi < x_values.size(); ++xi) {
        if (both[index(ti, xi)]) return true;
    }
    return false;
}

void RegionGrid::write_csv(std::ostream& out) const {
    out << "t,x,edge12,edge21,both\n";
    for (std::size_t ti = 0; ti < t_values.size(); ++ti) {
        for (std::size_t xi = 0; xi < x_values.size(); ++xi) {
            const auto i = index(ti, xi);
            out << fmt9(t_values[ti]) << ',' << fmt9(x_values[xi]) << ',' << int(edge12[i]) << ','
                << int(edge21[i]) << ',' << int(both[i]) << '\n';
        }
    }
}

RegionGrid region_scan(const PlanarPair& pair, Interval t_range, Interval x_range, int resolution) {
    pair.validate();
    if (resolution < 32) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 32");
    if (!(t_range.lo >= 0.0) || !(t_range.hi > t_range.lo) || !(x_range.lo > 0.0) || !(x_range.hi > x_range.lo)) {
        throw Error(ErrorCode::InvalidArgument, "scan ranges must be positive and non-empty");
    }
    RegionGrid grid;
    const auto res = static_cast<std::size_t>(resolution);
    for (std::size_t i = 1; i <= res; ++i) {
        grid.t_values.push_back(t_range.lo + t_range.width() * static_cast<double>(i) / static_cast<double>(res));
    }
    const double log_lo = std::log(x_range.lo);
    const double log_hi = std::log(x_range.hi);
    for (std::size_t i = 0; i < res; ++i) {
        grid.x_values.push_back(std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(res - 1)));
    }
    grid.x_values.back() = x_range.hi;

    grid.edge12.resize(res * res);
    grid.edge21.resize(res * res);
    grid.both.resize(res * res);
    PlanarPair scaled = pair;
    for (std::size_t xi = 0; xi < res; ++xi) {
        scaled.p = scaled.r = grid.x_values[xi];
        scaled.q = scaled.s = 1.0;
        for (std::size_t ti = 0; ti < res; ++ti) {
            const double t = grid.t_values[ti];
            const auto v = td_values(scaled, t, t);
            const bool e12 = v.t1 < 1.0 + v.d1 && v.d1 < 1.0;
            const bool e21 = v.t2 < 1.0 + v.d2 && v.d2 < 1.0;
            const auto i = grid.index(ti, xi);
            grid.edge12[i] = e12;
            grid.edge21[i] = e21;
            grid.both[i] = e12 && e21;
        }
    }
    return grid;
}

bool diagonal_hurwitz_combination(double alpha, double beta, double gamma, double delta) {
    // w alpha + (1 - w) gamma < 0 and w beta + (1 - w) delta < 0 for some w in [0, 1].
    double lo = 0.0;
    double hi = 1.0;
    bool lo_open = false;
    bool hi_open = false;
    auto constrain = [&](double x, double y) {
        // y + w (x - y) < 0
        const double slope = x - y;
        if (slope == 0.0) {
            if (!(y < 0.0)) hi = -1.0;
            return;
        }
        const double root = -y / slope;
        if (slope > 0.0) {
            if (root < hi || (root == hi && !hi_open)) {
                hi = root;
                hi_open = true;
            }
        } else if (root > lo || (root == lo && !lo_open)) {
            lo = root;
            lo_open = true;
        }
    };
    constrain(alpha, gamma);
    constrain(beta, delta);
    if (lo_open || hi_open) return lo < hi;
    return lo <= hi;
}

DiagonalVerdict diagonal_case(double alpha, double beta, double gamma, double delta) {
    for (double v : {alpha, beta, gamma, delta}) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "diagonal entries must be finite");
    }
    const bool pattern_i = alpha < 0.0 && beta >= 0.0 && gamma >= 0.0 && delta < 0.0;
    const bool pattern_ii = alpha >= 0.0 && beta < 0.0 && gamma < 0.0 && delta >= 0.0;
    if (!pattern_i && !pattern_ii) {
        throw Error(ErrorCode::SignPatternUnsupported, "sign pattern is neither (i) nor (ii)");
    }
    DiagonalVerdict verdict;
    verdict.hurwitz_combination = diagonal_hurwitz_combination(alpha, beta, gamma, delta);
    if (pattern_ii) {
        // Swapping the coordinates maps (ii) onto (i).
        auto swapped = diagonal_case(beta, alpha, delta, gamma);
        if (swapped.witness) std::swap(swapped.witness->a, swapped.witness->d);
        swapped.hurwitz_combination = verdict.hurwitz_combination;
        return swapped;
    }

    // Need gamma s < ln|a| < -alpha t and delta s < ln|d| < -beta t, i.e.
    // gamma / |alpha| < t / s < |delta| / beta.
    verdict.feasible = beta * gamma < alpha * delta;
    if (verdict.feasible) {
        const double ratio_lo = gamma / -alpha;
        const double ratio = beta > 0.0 ? 0.5 * (ratio_lo + -delta / beta) : ratio_lo + 1.0;
        DiagonalWitness w;
        w.s = 1.0;
        w.t = ratio;
        w.a = std::exp(0.5 * (gamma * w.s - alpha * w.t));
        w.d = std::exp(0.5 * (delta * w.s - beta * w.t));
        verdict.witness = w;
    }
    return verdict;
}

PlanarPair planar_pair_from_system(const SwitchedSystem& system) {
    if (system.dimension() != 2) throw Error(ErrorCode::NotPlanar, "system dimension must be 2");
    const auto& g = system.graph();
    if (g.vertex_count() != 2 || g.edges().size() != 2 || !g.has_edge({1, 2}) || !g.has_edge({2, 1})) {
        throw Error(ErrorCode::NotPlanar, "graph must be the two-vertex ring");
    }
    PlanarPair pair;
    Matrix units[2];
    double scales[2][2];
    for (int v = 0; v < 2; ++v) {
        const auto& d = system.decomposition(v + 1);
        const auto& blocks = d.blocks();
        if (blocks.size() != 2 || blocks[0].kind != BlockKind::Real || blocks[1].kind != BlockKind::Real) {
            throw Error(ErrorCode::NotPlanar, "subsystem " + std::to_string(v + 1) + " needs two real eigenvalues");
        }
        if (!(blocks[0].lambda < 0.0)) {
            throw Error(ErrorCode::NotPlanar, "subsystem " + std::to_string(v + 1) + " needs a negative eigenvalue");
        }
        const double lo = -blocks[0].lambda;
        const double hi = blocks[1].lambda;
        if (v == 0) {
            pair.alpha1 = lo;
            pair.alpha2 = hi;
        } else {
            pair.beta1 = lo;
            pair.beta2 = hi;
        }
        units[v] = d.P();
        for (int c = 0; c < 2; ++c) {
            scales[v][c] = d.P().col(c).norm();
            units[v].col(c) /= scales[v][c];
        }
    }
    pair.a = units[1].inverse() * units[0];
    pair.p = scales[0][0];
    pair.q = scales[0][1];
    pair.r = scales[1][0];
    pair.s = scales[1][1];
    pair.validate();
    return pair;
}

}  // namespace dwellcert
