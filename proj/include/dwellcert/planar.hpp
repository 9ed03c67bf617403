#pragma once

// Closed forms for two-dimensional systems on the two-vertex ring with real
// diagonalizable subsystems J_1 = diag(-alpha1, alpha2), J_2 = diag(-beta1, beta2).

#include "dwellcert/certify.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace dwellcert {

/// |tr M| < 1 + det M and |det M| < 1, i.e. spectral radius below one.
[[nodiscard]] bool schur_stable_2x2(const Matrix& m);
/// ||M|| < 1 via schur_stable_2x2(M^T M).
[[nodiscard]] bool norm_lt_one_2x2(const Matrix& m);

struct PlanarPair {
    double alpha1 = 1.0;  // > 0
    double alpha2 = 0.0;
    double beta1 = 1.0;  // > 0
    double beta2 = 0.0;
    Matrix a = Matrix::Identity(2, 2);  // Q^-1 P for unit-column P (vertex 1) and Q (vertex 2)
    double p = 1.0, q = 1.0;            // D_1 = diag(p, q)
    double r = 1.0, s = 1.0;            // D_2 = diag(r, s)

    /// Throws InvalidArgument / WrongDimension / DegenerateScaling.
    void validate() const;
};

struct TDValues {
    double t1 = 0.0, d1 = 0.0, t2 = 0.0, d2 = 0.0;
};

/// T_i is the squared Frobenius norm and D_i the squared determinant of
/// M_1 = D_2^-1 a D_1 e^{J_1 t0} and M_2 = D_1^-1 a^-1 D_2 e^{J_2 s0}.
[[nodiscard]] TDValues td_values(const PlanarPair& pair, double t0, double s0);

/// The two edge matrices M_1 and M_2 built directly.
[[nodiscard]] std::pair<Matrix, Matrix> planar_edge_matrices(const PlanarPair& pair, double t0, double s0);

/// T1 < 1 + D1, D1 < 1, T2 < 1 + D2 and D2 < 1.
[[nodiscard]] bool planar_feasible_at(const PlanarPair& pair, double t0, double s0);
/// T1 < 1 and T2 < 1.
[[nodiscard]] bool frobenius_sufficient_at(const PlanarPair& pair, double t0, double s0);

struct RegionGrid {
    std::vector<double> t_values;
    std::vector<double> x_values;
    // Row-major by t then x.
    std::vector<bool> edge12;
    std::vector<bool> edge21;
    std::vector<bool> both;

    [[nodiscard]] std::size_t index(std::size_t ti, std::size_t xi) const { return ti * x_values.size() + xi; }
    /// Smallest and largest t with some x in the "both" region.
    [[nodiscard]] std::optional<Interval> both_t_extent() const;
    /// True when some x at this t lies in the "both" region.
    [[nodiscard]] bool both_at(std::size_t ti) const;

    void write_csv(std::ostream& out) const;
};

/// Evaluates both edges with D_1 = D_2 = diag(x, 1) and t0 = s0 = t. t is
/// sampled at lo + (hi - lo) i / resolution for i = 1..resolution, x
/// log-uniformly over the closed range.
[[nodiscard]] RegionGrid region_scan(const PlanarPair& pair, Interval t_range, Interval x_range, int resolution);

struct DiagonalWitness {
    double a = 1.0, d = 1.0, t = 1.0, s = 1.0;
};

struct DiagonalVerdict {
    bool feasible = false;
    std::optional<DiagonalWitness> witness;
    bool hurwitz_combination = false;
};

/// A_1 = diag(alpha, beta), A_2 = diag(gamma, delta). Sign pattern (i)
/// alpha < 0 <= beta, delta < 0 <= gamma, or its coordinate swap (ii).
/// Throws SignPatternUnsupported otherwise.
[[nodiscard]] DiagonalVerdict diagonal_case(double alpha, double beta, double gamma, double delta);

/// Some w in [0, 1] makes w diag(alpha, beta) + (1 - w) diag(gamma, delta) Hurwitz.
[[nodiscard]] bool diagonal_hurwitz_combination(double alpha, double beta, double gamma, double delta);

/// Extracts the pair from a planar two-vertex ring whose subsystems have one
/// negative and one other real eigenvalue. Columns of each P are split into
/// unit directions and the scales p, q, r, s. Throws NotPlanar.
[[nodiscard]] PlanarPair planar_pair_from_system(const SwitchedSystem& system);

}  // namespace dwellcert
