#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dwellcert::testing {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix random_matrix(std::mt19937_64& rng, int n, double scale) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = scale * uniform(rng, -1.0, 1.0);
    }
    return m;
}

double oracle_spectral_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double oracle_smallest_singular_value(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

Matrix taylor_expm(const Matrix& a, double t) {
    Matrix x = a * t;
    const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
    x /= std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

std::vector<VertexPath> brute_force_cycles(const SwitchGraph& g) {
    const int k = g.vertex_count();
    std::vector<VertexPath> out;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<Vertex> subset;
        for (int v = 1; v <= k; ++v) {
            if (mask & (1u << (v - 1))) subset.push_back(v);
        }
        if (subset.size() < 2) continue;
        // The smallest vertex leads; permute the rest.
        std::vector<Vertex> rest(subset.begin() + 1, subset.end());
        do {
            VertexPath cycle{subset.front()};
            cycle.insert(cycle.end(), rest.begin(), rest.end());
            cycle.push_back(subset.front());
            bool ok = true;
            for (std::size_t i = 0; i + 1 < cycle.size() && ok; ++i) ok = g.has_edge({cycle[i], cycle[i + 1]});
            if (ok) out.push_back(cycle);
        } while (std::next_permutation(rest.begin(), rest.end()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Vector rk4(const Matrix& a, Vector x, double duration, double h) {
    const int steps = static_cast<int>(std::ceil(duration / h));
    const double dt = duration / steps;
    for (int i = 0; i < steps; ++i) {
        const Vector k1 = a * x;
        const Vector k2 = a * (x + 0.5 * dt * k1);
        const Vector k3 = a * (x + 0.5 * dt * k2);
        const Vector k4 = a * (x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

SwitchedSystem diagonal_system(SwitchGraph graph, const std::vector<std::vector<double>>& diagonals) {
    std::vector<Matrix> mats;
    std::vector<SpectralDecomposition> ds;
    for (const auto& diag : diagonals) {
        const auto n = static_cast<Eigen::Index>(diag.size());
        Matrix a = Eigen::Map<const Vector>(diag.data(), n).asDiagonal();
        std::vector<JordanBlock> blocks;
        for (double v : diag) blocks.push_back(JordanBlock::real(v));
        ds.push_back(decomposition_from_parts(Matrix::Identity(n, n), blocks, a));
        mats.push_back(std::move(a));
    }
    return SwitchedSystem(std::move(graph), std::move(mats), std::move(ds));
}

std::string fixture_path(const std::string& name) { return std::string(DWELLCERT_FIXTURE_DIR) + "/" + name + ".json"; }

SystemDocument load_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_document(text.str());
}

}  // namespace dwellcert::testing
