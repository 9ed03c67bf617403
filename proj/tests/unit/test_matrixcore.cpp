#include "dwellcert/error.hpp"
#include "dwellcert/matrixcore.hpp"

#include "../support/oracles.hpp"
#include "../support/properties.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dwellcert;
using namespace dwellcert::testing;
using Catch::Approx;

TEST_CASE("norms agree with the symmetric eigensolver", "[matrixcore]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const Matrix m = random_matrix(rng, n, 3.0);
        CHECK(spectral_norm(m) == Approx(oracle_spectral_norm(m)).epsilon(1e-10));
        CHECK(smallest_singular_value(m) == Approx(oracle_smallest_singular_value(m)).margin(1e-7));
        CHECK(frobenius_norm(m) >= spectral_norm(m) - 1e-12);
    }
}

TEST_CASE("smallest singular value times inverse norm is one", "[matrixcore][property]") {
    const auto r = singular_value_inverse_identity();
    INFO(r.detail);
    CHECK(r.ok);
}

TEST_CASE("product of norm-dominated factors has small singular values", "[matrixcore][property]") {
    const auto r = norm_product_implication();
    INFO(r.detail);
    CHECK(r.ok);
}

TEST_CASE("expm matches a Taylor series", "[matrixcore]") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 40; ++i) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const Matrix a = random_matrix(rng, n, 2.0);
        const double t = uniform(rng, 0.01, 3.0);
        const Matrix ref = taylor_expm(a, t);
        CHECK((expm(a, t) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
    }
    CHECK(expm(Matrix::Zero(3, 3), 2.0).isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("exp_jordan matches expm of the assembled form", "[matrixcore]") {
    const std::vector<JordanBlock> blocks{JordanBlock::real(-0.5), JordanBlock::complex_pair(0.2, 1.3),
                                          JordanBlock::defective(-1.0, 3)};
    const Matrix j = assemble_jordan(blocks);
    REQUIRE(j.rows() == 6);
    CHECK(j(1, 2) == 1.3);
    CHECK(j(2, 1) == -1.3);
    CHECK(j(3, 4) == 1.0);
    for (double t : {0.0, 0.3, 2.0, 7.5}) {
        CHECK((exp_jordan(blocks, t) - expm(j, t)).norm() < 1e-10 * std::max(1.0, expm(j, t).norm()));
    }
    CHECK(block_abscissa(blocks) == 0.2);
}

TEST_CASE("invalid Jordan blocks are rejected", "[matrixcore]") {
    CHECK_THROWS_AS(validate_blocks(std::vector{JordanBlock{BlockKind::ComplexPair, 0.0, -1.0, 2}}), Error);
    CHECK_THROWS_AS(validate_blocks(std::vector{JordanBlock{BlockKind::Defective, 0.0, 0.0, 1}}), Error);
    CHECK_THROWS_AS(validate_blocks(std::vector{JordanBlock{BlockKind::Real, 0.0, 0.0, 2}}), Error);
}

TEST_CASE("real Jordan form of the planar example", "[matrixcore]") {
    Matrix a1(2, 2), a2(2, 2);
    a1 << -1.9, 0.6, 0.6, -0.1;
    a2 << 0.1, -0.9, 0.1, -1.4;
    const auto d1 = real_jordan(a1);
    const auto d2 = real_jordan(a2);
    CHECK(d1.blocks()[0].lambda == Approx(-2.08167).margin(1e-4));
    CHECK(d1.blocks()[1].lambda == Approx(0.0816654).margin(1e-4));
    CHECK(d2.blocks()[0].lambda == Approx(-1.33739).margin(1e-4));
    CHECK(d2.blocks()[1].lambda == Approx(0.0373864).margin(1e-4));
    CHECK(d1.reconstruction_residual() < 1e-12);
    CHECK(d1.P().col(0).norm() == Approx(1.0));
    CHECK(d2.P().col(1).norm() == Approx(1.0));
}

TEST_CASE("real Jordan form with complex and mixed spectra", "[matrixcore]") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix a = random_matrix(rng, n);
        const auto d = real_jordan(a);
        CHECK(d.reconstruction_residual() < 1e-9);
        CHECK(total_size(d.blocks()) == n);
        for (std::size_t b = 1; b < d.blocks().size(); ++b) CHECK(d.blocks()[b - 1].lambda <= d.blocks()[b].lambda);
        CHECK(d.abscissa() == Approx(spectral_abscissa(a)).margin(1e-9));
    }
    Matrix rot(2, 2);
    rot << -0.1, 2.0, -2.0, -0.1;
    const auto d = real_jordan(rot);
    REQUIRE(d.blocks().size() == 1);
    CHECK(d.blocks()[0].kind == BlockKind::ComplexPair);
    CHECK(d.blocks()[0].mu == Approx(2.0));
}

TEST_CASE("near-defective matrices are refused", "[matrixcore]") {
    Matrix a(2, 2);
    a << 1.0, 1.0, 0.0, 1.0;
    try {
        (void)real_jordan(a);
        FAIL("expected NearDefective");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NearDefective);
    }
}

TEST_CASE("supplied decompositions are checked", "[matrixcore]") {
    Matrix a(2, 2);
    a << 1.0, 1.0, 0.0, 1.0;
    const Matrix p = Matrix::Identity(2, 2);
    const auto d = decomposition_from_parts(p, {JordanBlock::defective(1.0, 2)}, a);
    CHECK(d.reconstruction_residual() == 0.0);
    try {
        (void)decomposition_from_parts(p, {JordanBlock::real(1.0), JordanBlock::real(1.0)}, a);
        FAIL("expected ReconstructionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ReconstructionMismatch);
    }
    try {
        (void)decomposition_from_parts(Matrix::Zero(2, 2), {JordanBlock::defective(1.0, 2)}, a);
        FAIL("expected SingularP");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularP);
    }
}

TEST_CASE("normalize_columns keeps the decomposition valid", "[matrixcore]") {
    Matrix a(3, 3);
    a << 0.0, 2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, -1.0;
    Matrix p(3, 3);
    p << 3.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.5;
    const Matrix a_scaled = p * a * p.inverse();
    const auto d = decomposition_from_parts(p, {JordanBlock::complex_pair(0.0, 2.0), JordanBlock::real(-1.0)}, a_scaled);
    const auto n = normalize_columns(d);
    CHECK(n.reconstruction_residual() < 1e-12);
    CHECK(n.P().col(0).norm() <= 1.0 + 1e-12);
    CHECK(n.P().col(2).norm() == Approx(1.0));
}

TEST_CASE("matrix validation", "[matrixcore]") {
    CHECK_THROWS_AS(require_square_finite(Matrix::Zero(2, 3)), Error);
    CHECK_THROWS_AS(require_square_finite(Matrix::Zero(17, 17)), Error);
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    try {
        require_square_finite(m);
        FAIL("expected NonFinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
}

TEST_CASE("Hurwitz checks", "[matrixcore]") {
    Matrix a(2, 2), b(2, 2);
    a << -1.0, 0.0, 0.0, 0.5;
    b << 0.5, 0.0, 0.0, -1.0;
    CHECK_FALSE(is_hurwitz(a));
    CHECK(is_hurwitz(-Matrix::Identity(2, 2)));
    const std::vector<Matrix> pair{a, b};
    const auto w = hurwitz_convex_combination(pair, 64);
    REQUIRE(w.has_value());
    CHECK(is_hurwitz((*w)[0] * a + (*w)[1] * b));
    const std::vector<Matrix> unstable{Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
    CHECK_FALSE(hurwitz_convex_combination(unstable, 32).has_value());
}

TEST_CASE("Frobenius norm dominates the spectral norm", "[matrixcore]") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 1000; ++i) {
        const Matrix m = random_matrix(rng, 1 + static_cast<int>(rng() % 8), 5.0);
        REQUIRE(frobenius_norm(m) >= spectral_norm(m) * (1.0 - 1e-14));
        REQUIRE(frobenius_norm(m) == Approx(std::sqrt((m.transpose() * m).trace())));
    }
}
