#include "rootcast/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rootcast;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

TEST_CASE("svd of identity and diagonal matrices") {
    auto s = linalg::svd(MatrixXd::Identity(3, 3));
    CHECK(s.singular_values.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(s.singular_values[i] == doctest::Approx(1.0));

    MatrixXd d = MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    auto sd = linalg::svd(d);
    CHECK(sd.singular_values[0] == doctest::Approx(3.0));
    CHECK(sd.singular_values[1] == doctest::Approx(1.0));
}

TEST_CASE("svd reconstruction and orthonormality on random matrices") {
    for (int trial = 0; trial < 8; ++trial) {
        const Eigen::Index rows = 3 + trial;
        const Eigen::Index cols = 2 + (trial * 7) % 6;
        MatrixXd m = oracles::gaussian_matrix(rows, cols, 100 + trial);
        auto s = linalg::svd(m);
        CHECK((s.reconstruct() - m).norm() <= 1e-10 * m.norm());
        const Eigen::Index k = s.singular_values.size();
        CHECK((s.left_vectors.transpose() * s.left_vectors - MatrixXd::Identity(k, k)).norm() <
              1e-10);
        CHECK((s.right_vectors.transpose() * s.right_vectors - MatrixXd::Identity(k, k)).norm() <
              1e-10);
        for (Eigen::Index i = 0; i + 1 < k; ++i) {
            CHECK(s.singular_values[i] >= s.singular_values[i + 1]);
        }
        CHECK(s.singular_values[k - 1] >= 0.0);
    }
}

TEST_CASE("svd rejects non-finite input") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(linalg::svd(m), std::invalid_argument);
}

TEST_CASE("truncate_rank on a diagonal matrix is Eckart-Young") {
    MatrixXd d = MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    auto s = linalg::svd(d);
    MatrixXd t1 = linalg::truncate_rank(s, 1);
    CHECK(t1(0, 0) == doctest::Approx(3.0));
    CHECK(std::abs(t1(1, 1)) < 1e-12);

    MatrixXd full = linalg::truncate_rank(s, 2);
    CHECK((full - d).norm() < 1e-12);

    CHECK_THROWS_AS(linalg::truncate_rank(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(linalg::truncate_rank(s, 3), std::invalid_argument);
}

TEST_CASE("truncation error equals discarded singular-value energy") {
    MatrixXd m = oracles::gaussian_matrix(6, 6, 42);
    auto s = linalg::svd(m);
    for (Eigen::Index rho = 1; rho <= 6; ++rho) {
        const MatrixXd t = linalg::truncate_rank(s, rho);
        double discarded = 0.0;
        for (Eigen::Index i = rho; i < 6; ++i) {
            discarded += s.singular_values[i] * s.singular_values[i];
        }
        CHECK((m - t).norm() == doctest::Approx(std::sqrt(discarded)).epsilon(1e-10));
        // idempotence
        const MatrixXd tt = linalg::truncate_rank(linalg::svd(t), rho);
        CHECK((tt - t).norm() <= 1e-12 * (1.0 + t.norm()));
    }
}

TEST_CASE("least_squares identity system returns the targets") {
    MatrixXd b = oracles::gaussian_matrix(4, 3, 7);
    MatrixXd w = linalg::least_squares(MatrixXd::Identity(4, 4), b);
    CHECK((w - b).norm() < 1e-12);
}

TEST_CASE("least_squares rank-deficient system gives the min-norm solution") {
    // Independent oracle: the explicit pseudoinverse of the all-ones 2x2
    // matrix (rank one, sigma = 2) is ones(2,2)/4, so W = [[1],[1]].
    MatrixXd a(2, 2);
    a << 1, 1, 1, 1;
    MatrixXd b(2, 1);
    b << 2, 2;
    MatrixXd w = linalg::least_squares(a, b);
    CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(w(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("least_squares recovers the generator of an exact full-rank system") {
    MatrixXd a = oracles::gaussian_matrix(20, 5, 11);
    MatrixXd w0 = oracles::gaussian_matrix(5, 3, 12);
    MatrixXd w = linalg::least_squares(a, a * w0);
    CHECK((w - w0).norm() <= 1e-10 * w0.norm());
}

TEST_CASE("least_squares residual is orthogonal to the column space") {
    for (int trial = 0; trial < 6; ++trial) {
        MatrixXd a = oracles::gaussian_matrix(15, 4 + trial % 3, 200 + trial);
        MatrixXd b = oracles::gaussian_matrix(15, 2, 300 + trial);
        MatrixXd w = linalg::least_squares(a, b);
        const MatrixXd residual = b - a * w;
        CHECK((a.transpose() * residual).norm() < 1e-8 * a.norm() * b.norm());
    }
}

TEST_CASE("eigenvalues of small known matrices") {
    MatrixXd d = MatrixXd::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 5.0;
    VectorXcd e = linalg::eigenvalues(d);
    CHECK(oracles::min_distance_to(e, {2.0, 0.0}) < 1e-12);
    CHECK(oracles::min_distance_to(e, {5.0, 0.0}) < 1e-12);

    MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    VectorXcd er = linalg::eigenvalues(rot);
    CHECK(oracles::min_distance_to(er, {0.0, 1.0}) < 1e-12);
    CHECK(oracles::min_distance_to(er, {0.0, -1.0}) < 1e-12);

    MatrixXd rect(2, 3);
    CHECK_THROWS_AS(linalg::eigenvalues(rect), std::invalid_argument);
}

TEST_CASE("eigenvalues of the golden-ratio companion match the quadratic formula") {
    // companion of r^2 - r - 1
    MatrixXd c(2, 2);
    c << 1, 1, 1, 0;
    VectorXcd e = linalg::eigenvalues(c);
    const auto expected = oracles::quadratic_roots(1.0, 1.0);
    CHECK(oracles::min_distance_to(e, expected[0]) < 1e-10);
    CHECK(oracles::min_distance_to(e, expected[1]) < 1e-10);
    CHECK(std::abs(expected[0].real() - (1.0 + std::sqrt(5.0)) / 2.0) < 1e-15);
}

TEST_CASE("rfft of simple signals") {
    VectorXd ones(4);
    ones << 1, 1, 1, 1;
    VectorXcd f = linalg::rfft(ones);
    REQUIRE(f.size() == 3);
    CHECK(std::abs(f[0] - std::complex<double>(4, 0)) < 1e-12);
    CHECK(std::abs(f[1]) < 1e-12);
    CHECK(std::abs(f[2]) < 1e-12);

    VectorXd alt(4);
    alt << 1, 0, -1, 0;
    VectorXcd fa = linalg::rfft(alt);
    CHECK(std::abs(fa[0]) < 1e-12);
    CHECK(std::abs(fa[1] - std::complex<double>(2, 0)) < 1e-12);
    CHECK(std::abs(fa[2]) < 1e-12);
}

TEST_CASE("rfft matches the naive DFT on odd and even non-power-of-two lengths") {
    for (Eigen::Index n : {5, 12, 45, 720}) {
        VectorXd x = oracles::gaussian_matrix(n, 1, 500 + n).col(0);
        VectorXcd fast = linalg::rfft(x);
        VectorXcd slow = oracles::naive_rfft(x);
        CHECK((fast - slow).norm() <= 1e-9 * (1.0 + slow.norm()));
    }
}

TEST_CASE("irfft inverts rfft to 1e-12 relative") {
    for (Eigen::Index n : {1, 2, 7, 16, 31}) {
        VectorXd x = oracles::gaussian_matrix(n, 1, 600 + n).col(0);
        VectorXd back = linalg::irfft(linalg::rfft(x), n);
        CHECK((back - x).norm() <= 1e-12 * (1.0 + x.norm()));
    }
    VectorXcd wrong(4);
    CHECK_THROWS_AS(linalg::irfft(wrong, 4), std::invalid_argument);
}

TEST_CASE("row-wise FFT helpers agree with the vector versions") {
    MatrixXd x = oracles::gaussian_matrix(3, 10, 77);
    Eigen::MatrixXcd f = linalg::rfft_rows(x);
    for (Eigen::Index r = 0; r < 3; ++r) {
        CHECK((f.row(r).transpose() - linalg::rfft(x.row(r).transpose())).norm() < 1e-12);
    }
    MatrixXd back = linalg::irfft_rows(f, 10);
    CHECK((back - x).norm() < 1e-12);
}

TEST_CASE("hungarian_match on hand-checked costs") {
    MatrixXd favor = MatrixXd::Ones(3, 3);
    favor.diagonal().setZero();
    auto perm = linalg::hungarian_match(favor);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(perm[static_cast<size_t>(i)] == i);

    MatrixXd c(2, 2);
    c << 1, 2, 2, 1;
    auto p2 = linalg::hungarian_match(c);
    CHECK(p2[0] == 0);
    CHECK(p2[1] == 1);
}

TEST_CASE("hungarian_match equals brute force on random instances up to p=6") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 5);  // 2..6
        MatrixXd cost = oracles::gaussian_matrix(p, p, 900 + trial).array().abs();
        auto perm = linalg::hungarian_match(cost);
        double total = 0.0;
        std::vector<bool> used(static_cast<size_t>(p), false);
        for (Eigen::Index i = 0; i < p; ++i) {
            CHECK(!used[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
            used[static_cast<size_t>(perm[static_cast<size_t>(i)])] = true;
            total += cost(i, perm[static_cast<size_t>(i)]);
        }
        CHECK(total == doctest::Approx(oracles::brute_force_assignment(cost)).epsilon(1e-10));
    }
}

TEST_CASE("BLAS-routed products match Eigen expressions") {
    MatrixXd a = oracles::gaussian_matrix(30, 7, 1);
    MatrixXd b = oracles::gaussian_matrix(7, 5, 2);
    CHECK((linalg::matmul(a, b) - a * b).norm() < 1e-12);
    CHECK((linalg::gram(a) - a.transpose() * a).norm() < 1e-12);
    MatrixXd y = oracles::gaussian_matrix(30, 4, 3);
    CHECK((linalg::crossprod(a, y) - a.transpose() * y).norm() < 1e-12);
}
