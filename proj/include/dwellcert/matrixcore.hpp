#pragma once

// Dense real linear algebra for small systems (n <= 16): norms, singular
// values, real Jordan decompositions and matrix exponentials.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace dwellcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxDimension = 16;

/// Throws NonFinite / DimensionMismatch unless `m` is a finite square matrix
/// with 1 <= n <= kMaxDimension.
void require_square_finite(const Matrix& m, const char* what = "matrix");

[[nodiscard]] double spectral_norm(const Matrix& m);
[[nodiscard]] double smallest_singular_value(const Matrix& m);
/// sqrt(sum m_ij^2), so that frobenius_norm(m) >= spectral_norm(m).
[[nodiscard]] double frobenius_norm(const Matrix& m);

enum class BlockKind { Real, ComplexPair, Defective };

/// One block of a real Jordan form.
///
///   Real         [lambda]                              size 1
///   ComplexPair  [[lambda, mu], [-mu, lambda]]         size 2, mu > 0
///   Defective    lambda * I + ones on the superdiagonal, size >= 2
struct JordanBlock {
    BlockKind kind = BlockKind::Real;
    double lambda = 0.0;
    double mu = 0.0;
    int size = 1;

    static JordanBlock real(double lambda) { return {BlockKind::Real, lambda, 0.0, 1}; }
    static JordanBlock complex_pair(double lambda, double mu) {
        return {BlockKind::ComplexPair, lambda, mu, 2};
    }
    static JordanBlock defective(double lambda, int size) {
        return {BlockKind::Defective, lambda, 0.0, size};
    }

    bool operator==(const JordanBlock&) const = default;
};

void validate_blocks(std::span<const JordanBlock> blocks);
[[nodiscard]] int total_size(std::span<const JordanBlock> blocks);
[[nodiscard]] Matrix assemble_jordan(std::span<const JordanBlock> blocks);
/// Largest block lambda, i.e. the spectral abscissa of the assembled form.
[[nodiscard]] double block_abscissa(std::span<const JordanBlock> blocks);

/// A = P J P^-1 with J in real Jordan form.
class SpectralDecomposition {
public:
    [[nodiscard]] const Matrix& P() const noexcept { return p_; }
    [[nodiscard]] const Matrix& P_inverse() const noexcept { return p_inv_; }
    [[nodiscard]] const std::vector<JordanBlock>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const Matrix& source() const noexcept { return source_; }
    [[nodiscard]] double condition_number() const noexcept { return condition_; }
    [[nodiscard]] Matrix J() const { return assemble_jordan(blocks_); }
    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(p_.rows()); }
    [[nodiscard]] double abscissa() const { return block_abscissa(blocks_); }
    /// ||P J P^-1 - A|| / ||A|| (absolute when A = 0).
    [[nodiscard]] double reconstruction_residual() const;

    friend SpectralDecomposition real_jordan(const Matrix&, std::optional<double>);
    friend SpectralDecomposition decomposition_from_parts(const Matrix&,
                                                          std::vector<JordanBlock>,
                                                          const Matrix&, double);

private:
    SpectralDecomposition(Matrix p, std::vector<JordanBlock> blocks, Matrix source);

    Matrix p_;
    Matrix p_inv_;
    std::vector<JordanBlock> blocks_;
    Matrix source_;
    double condition_ = 1.0;
};

inline constexpr double kDefaultReconstructionTolerance = 1e-6;

/// Numerical real Jordan form for matrices with well-separated eigenvalues.
/// Blocks are ordered by ascending real part (then imaginary part); columns of
/// P have unit Euclidean norm. Throws NearDefective when two eigenvalues are
/// closer than `gap_tolerance` (default 1e-6 * ||A||).
[[nodiscard]] SpectralDecomposition real_jordan(const Matrix& a,
                                                std::optional<double> gap_tolerance = std::nullopt);

/// Wraps a user-supplied decomposition. P is stored as given.
[[nodiscard]] SpectralDecomposition decomposition_from_parts(
    const Matrix& p, std::vector<JordanBlock> blocks, const Matrix& a,
    double tolerance = kDefaultReconstructionTolerance);

/// Same decomposition with each block's columns rescaled to unit norm. Columns
/// of a complex or defective block share one factor so the form stays valid.
[[nodiscard]] SpectralDecomposition normalize_columns(const SpectralDecomposition& d,
                                                      double tolerance = kDefaultReconstructionTolerance);

[[nodiscard]] Matrix exp_jordan(std::span<const JordanBlock> blocks, double t);
[[nodiscard]] Matrix expm(const Matrix& a, double t = 1.0);

[[nodiscard]] double spectral_abscissa(const Matrix& a);
[[nodiscard]] bool is_hurwitz(const Matrix& a);

/// Heuristic search for simplex weights w with sum_i w_i A_i Hurwitz. An empty
/// result does not prove that no such combination exists.
[[nodiscard]] std::optional<std::vector<double>> hurwitz_convex_combination(
    std::span<const Matrix> as, int grid_resolution);

}  // namespace dwellcert
