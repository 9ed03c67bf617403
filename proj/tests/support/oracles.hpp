#pragma once

// Independent reference computations used only by the tests.

#include "dwellcert/certify.hpp"
#include "dwellcert/graph.hpp"
#include "dwellcert/io.hpp"
#include "dwellcert/matrixcore.hpp"

#include <random>
#include <string>
#include <vector>

namespace dwellcert::testing {

Matrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0);
double uniform(std::mt19937_64& rng, double lo, double hi);

// sqrt of extreme eigenvalues of M^T M from the symmetric eigensolver.
double oracle_spectral_norm(const Matrix& m);
double oracle_smallest_singular_value(const Matrix& m);

// Truncated Taylor series with scaling and squaring.
Matrix taylor_expm(const Matrix& a, double t);

// Every simple cycle found by trying all vertex orderings of all subsets.
std::vector<VertexPath> brute_force_cycles(const SwitchGraph& g);

// Classical fourth-order Runge-Kutta with fixed step at most h.
Vector rk4(const Matrix& a, Vector x, double duration, double h);

// Diagonal subsystems with P = I supplied, so repeated eigenvalues are allowed.
SwitchedSystem diagonal_system(SwitchGraph graph, const std::vector<std::vector<double>>& diagonals);

std::string fixture_path(const std::string& name);
SystemDocument load_fixture(const std::string& name);

}  // namespace dwellcert::testing
