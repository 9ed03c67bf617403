#include "dwellcert/matrixcore.hpp"

#include "dwellcert/error.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

namespace dwellcert {

namespace {

constexpr double kSingularThreshold = 1e-12;
constexpr double kComputedReconstructionTolerance = 1e-8;
constexpr long kMaxSimplexGridPoints = 2'000'000;

Eigen::JacobiSVD<Matrix> svd_values(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m);  // singular values only
}

double relative_residual(const Matrix& p, const Matrix& p_inv,
                         std::span<const JordanBlock> blocks, const Matrix& a) {
    const Matrix recon = p * assemble_jordan(blocks) * p_inv;
    const double scale = spectral_norm(a);
    const double diff = spectral_norm(recon - a);
    return scale > 0.0 ? diff / scale : diff;
}

// Binomial coefficient with saturation, used only to size the simplex grid.
long saturating_choose(long n, long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    double acc = 1.0;
    for (long i = 1; i <= k; ++i) {
        acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (acc > 1e15) return std::numeric_limits<long>::max();
    }
    return static_cast<long>(std::llround(acc));
}

}  // namespace

void require_square_finite(const Matrix& m, const char* what) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " must be square with n >= 1");
    }
    if (m.rows() > kMaxDimension) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " exceeds the dimension cap of 16");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
    }
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    return svd_values(m).singularValues()(0);
}

double smallest_singular_value(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    const auto sv = svd_values(m).singularValues();
    return sv(sv.size() - 1);
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

// ---------------------------------------------------------------------------
// Jordan blocks

void validate_blocks(std::span<const JordanBlock> blocks) {
    for (const auto& b : blocks) {
        if (!std::isfinite(b.lambda) || !std::isfinite(b.mu)) {
            throw Error(ErrorCode::NonFinite, "Jordan block parameters must be finite");
        }
        switch (b.kind) {
            case BlockKind::Real:
                if (b.size != 1 || b.mu != 0.0) {
                    throw Error(ErrorCode::InvalidArgument, "real block must have size 1 and mu = 0");
                }
                break;
            case BlockKind::ComplexPair:
                if (b.size != 2 || !(b.mu > 0.0)) {
                    throw Error(ErrorCode::InvalidArgument,
                                "complex-pair block must have size 2 and mu > 0");
                }
                break;
            case BlockKind::Defective:
                if (b.size < 2 || b.mu != 0.0) {
                    throw Error(ErrorCode::InvalidArgument,
                                "defective block must have size >= 2 and mu = 0");
                }
                break;
        }
    }
}

int total_size(std::span<const JordanBlock> blocks) {
    return std::accumulate(blocks.begin(), blocks.end(), 0,
                           [](int acc, const JordanBlock& b) { return acc + b.size; });
}

Matrix assemble_jordan(std::span<const JordanBlock> blocks) {
    const int n = total_size(blocks);
    Matrix j = Matrix::Zero(n, n);
    int at = 0;
    for (const auto& b : blocks) {
        switch (b.kind) {
            case BlockKind::Real:
                j(at, at) = b.lambda;
                break;
            case BlockKind::ComplexPair:
                j(at, at) = b.lambda;
                j(at + 1, at + 1) = b.lambda;
                j(at, at + 1) = b.mu;
                j(at + 1, at) = -b.mu;
                break;
            case BlockKind::Defective:
                for (int i = 0; i < b.size; ++i) {
                    j(at + i, at + i) = b.lambda;
                    if (i + 1 < b.size) j(at + i, at + i + 1) = 1.0;
                }
                break;
        }
        at += b.size;
    }
    return j;
}

double block_abscissa(std::span<const JordanBlock> blocks) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) best = std::max(best, b.lambda);
    return best;
}

Matrix exp_jordan(std::span<const JordanBlock> blocks, double t) {
    if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "exp_jordan: t must be finite");
    const int n = total_size(blocks);
    Matrix e = Matrix::Zero(n, n);
    int at = 0;
    for (const auto& b : blocks) {
        const double growth = std::exp(b.lambda * t);
        switch (b.kind) {
            case BlockKind::Real:
                e(at, at) = growth;
                break;
            case BlockKind::ComplexPair: {
                const double c = std::cos(b.mu * t);
                const double s = std::sin(b.mu * t);
                e(at, at) = growth * c;
                e(at, at + 1) = growth * s;
                e(at + 1, at) = -growth * s;
                e(at + 1, at + 1) = growth * c;
                break;
            }
            case BlockKind::Defective: {
                // e^{lambda t} * sum_k t^k/k! N^k, N the nilpotent shift.
                double coeff = 1.0;
                for (int k = 0; k < b.size; ++k) {
                    for (int i = 0; i + k < b.size; ++i) e(at + i, at + i + k) = growth * coeff;
                    coeff *= t / static_cast<double>(k + 1);
                }
                break;
            }
        }
        at += b.size;
    }
    return e;
}

Matrix expm(const Matrix& a, double t) {
    if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "expm: t must be finite");
    require_square_finite(a, "expm argument");
    const Matrix scaled = a * t;
    return scaled.exp();
}

// ---------------------------------------------------------------------------
// Decompositions

SpectralDecomposition::SpectralDecomposition(Matrix p, std::vector<JordanBlock> blocks, Matrix source)
    : p_(std::move(p)), blocks_(std::move(blocks)), source_(std::move(source)) {
    p_inv_ = p_.partialPivLu().inverse();
    condition_ = spectral_norm(p_) * spectral_norm(p_inv_);
}

double SpectralDecomposition::reconstruction_residual() const {
    return relative_residual(p_, p_inv_, blocks_, source_);
}

SpectralDecomposition real_jordan(const Matrix& a, std::optional<double> gap_tolerance) {
    require_square_finite(a, "A");
    const auto n = a.rows();
    const double gap_tol = gap_tolerance.value_or(1e-6 * spectral_norm(a));

    Eigen::EigenSolver<Matrix> solver(a, true);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NearDefective, "eigenvalue iteration did not converge");
    }
    const Eigen::VectorXcd values = solver.eigenvalues();
    const Eigen::MatrixXcd vectors = solver.eigenvectors();

    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            min_gap = std::min(min_gap, std::abs(values(i) - values(j)));
        }
    }
    if (min_gap < gap_tol) {
        throw Error(ErrorCode::NearDefective,
                    "minimum eigenvalue gap " + std::to_string(min_gap) +
                        " is below tolerance " + std::to_string(gap_tol) +
                        "; supply the decomposition explicitly");
    }

    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (values(i).imag() >= 0.0) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
        if (values(l).real() != values(r).real()) return values(l).real() < values(r).real();
        return values(l).imag() < values(r).imag();
    });

    Matrix p(n, n);
    std::vector<JordanBlock> blocks;
    Eigen::Index col = 0;
    for (const auto idx : order) {
        const std::complex<double> value = values(idx);
        if (value.imag() == 0.0) {
            Vector v = vectors.col(idx).real();
            v.normalize();
            Eigen::Index pivot = 0;
            v.cwiseAbs().maxCoeff(&pivot);
            if (v(pivot) < 0.0) v = -v;
            p.col(col++) = v;
            blocks.push_back(JordanBlock::real(value.real()));
        } else {
            // v = x + iy for lambda + i mu gives A [x y] = [x y] [[lambda, mu], [-mu, lambda]].
            // Rotate the phase so |x| = |y|, then scale both by the same factor.
            Vector x = vectors.col(idx).real();
            Vector y = vectors.col(idx).imag();
            const double theta = 0.5 * std::atan2(x.squaredNorm() - y.squaredNorm(), 2.0 * x.dot(y));
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            const Vector xr = x * c - y * s;
            const Vector yr = x * s + y * c;
            const double scale = xr.norm();
            p.col(col++) = xr / scale;
            p.col(col++) = yr / scale;
            blocks.push_back(JordanBlock::complex_pair(value.real(), value.imag()));
        }
    }

    SpectralDecomposition d(std::move(p), std::move(blocks), a);
    if (d.reconstruction_residual() > kComputedReconstructionTolerance) {
        throw Error(ErrorCode::NearDefective,
                    "computed eigenvector basis reconstructs A with residual " +
                        std::to_string(d.reconstruction_residual()));
    }
    return d;
}

SpectralDecomposition decomposition_from_parts(const Matrix& p, std::vector<JordanBlock> blocks,
                                               const Matrix& a, double tolerance) {
    require_square_finite(p, "P");
    require_square_finite(a, "A");
    validate_blocks(blocks);
    if (p.rows() != a.rows() || total_size(blocks) != a.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "P, blocks and A must share dimension");
    }
    if (smallest_singular_value(p) <= kSingularThreshold) {
        throw Error(ErrorCode::SingularP, "P is singular");
    }
    SpectralDecomposition d(p, std::move(blocks), a);
    const double residual = d.reconstruction_residual();
    if (residual > tolerance) {
        throw Error(ErrorCode::ReconstructionMismatch,
                    "||P J P^-1 - A|| / ||A|| = " + std::to_string(residual));
    }
    return d;
}

SpectralDecomposition normalize_columns(const SpectralDecomposition& d, double tolerance) {
    Matrix p = d.P();
    int at = 0;
    for (const auto& b : d.blocks()) {
        if (b.kind == BlockKind::Real) {
            p.col(at).normalize();
        } else {
            // One factor for the whole block keeps its real Jordan structure intact.
            const double scale = p.middleCols(at, b.size).colwise().norm().maxCoeff();
            p.middleCols(at, b.size) /= scale;
        }
        at += b.size;
    }
    return decomposition_from_parts(p, d.blocks(), d.source(), tolerance);
}

// ---------------------------------------------------------------------------
// Spectra

double spectral_abscissa(const Matrix& a) {
    require_square_finite(a, "A");
    if (a.rows() == 1) return a(0, 0);
    Eigen::EigenSolver<Matrix> solver(a, false);
    return solver.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& a) { return spectral_abscissa(a) < 0.0; }

std::optional<std::vector<double>> hurwitz_convex_combination(std::span<const Matrix> as,
                                                              int grid_resolution) {
    const auto k = static_cast<long>(as.size());
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "need at least two matrices");
    if (grid_resolution < 1) throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
    for (const auto& a : as) {
        require_square_finite(a, "A");
        if (a.rows() != as.front().rows()) {
            throw Error(ErrorCode::DimensionMismatch, "all matrices must share dimension");
        }
    }

    long resolution = grid_resolution;
    while (resolution > 1 && saturating_choose(resolution + k - 1, k - 1) > kMaxSimplexGridPoints) {
        resolution /= 2;
    }

    auto combine = [&](const std::vector<double>& w) {
        Matrix m = Matrix::Zero(as.front().rows(), as.front().cols());
        for (long i = 0; i < k; ++i) m += w[static_cast<std::size_t>(i)] * as[static_cast<std::size_t>(i)];
        return spectral_abscissa(m);
    };
    auto centroid_distance = [&](const std::vector<double>& w) {
        double acc = 0.0;
        for (double wi : w) acc += (wi - 1.0 / static_cast<double>(k)) * (wi - 1.0 / static_cast<double>(k));
        return acc;
    };

    std::vector<double> best_w;
    double best_value = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& w) {
        const double value = combine(w);
        const double dist = centroid_distance(w);
        const bool better = value < best_value - 1e-12 ||
                            (std::abs(value - best_value) <= 1e-12 && dist < best_dist);
        if (better) {
            best_value = value;
            best_dist = dist;
            best_w = w;
        }
    };

    // Enumerate integer compositions of `resolution` into k parts.
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    std::vector<double> w(static_cast<std::size_t>(k));
    auto recurse = [&](auto&& self, long index, long remaining) -> void {
        if (index == k - 1) {
            counts[static_cast<std::size_t>(index)] = remaining;
            for (long i = 0; i < k; ++i) {
                w[static_cast<std::size_t>(i)] =
                    static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(resolution);
            }
            consider(w);
            return;
        }
        for (long c = remaining; c >= 0; --c) {
            counts[static_cast<std::size_t>(index)] = c;
            self(self, index + 1, remaining - c);
        }
    };
    recurse(recurse, 0, resolution);

    // Local refinement: move mass between pairs of weights with a shrinking step.
    double step = 1.0 / static_cast<double>(resolution);
    for (int iter = 0; iter < 60 && step > 1e-12; ++iter) {
        bool improved = false;
        for (long i = 0; i < k && !improved; ++i) {
            for (long j = 0; j < k && !improved; ++j) {
                if (i == j) continue;
                auto trial = best_w;
                const double move = std::min(step, trial[static_cast<std::size_t>(i)]);
                if (move <= 0.0) continue;
                trial[static_cast<std::size_t>(i)] -= move;
                trial[static_cast<std::size_t>(j)] += move;
                const double value = combine(trial);
                if (value < best_value - 1e-15) {
                    best_value = value;
                    best_w = trial;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    if (best_value < 0.0) return best_w;
    return std::nullopt;
}

}  // namespace dwellcert
