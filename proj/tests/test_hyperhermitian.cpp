#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "qma/hyperhermitian.hpp"
#include "qma/quaternion.hpp"

using namespace qma;

namespace {

HyperHermitianMatrix diag2(double a, double c) {
    return HyperHermitianMatrix::from_upper(2, {Quaternion::real(a), Quaternion{},
                                                Quaternion::real(c)});
}

}  // namespace

TEST_CASE("moore_det on identity and diagonal matrices") {
    for (int n = 1; n <= 4; ++n)
        CHECK(moore_det(HyperHermitianMatrix::identity(n)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moore_det(diag2(2.0, 3.0)) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("moore_det of [[1, j], [-j, 1]] vanishes") {
    const HyperHermitianMatrix a = HyperHermitianMatrix::from_upper(
        2, {Quaternion::real(1), Quaternion::unit_j(), Quaternion::real(1)});
    CHECK(std::abs(moore_det(a)) < 1e-12);
    CHECK(std::abs(real_embedding_oracle(a)) < 1e-10);
}

TEST_CASE("real embedding oracle: identity, diagonal, morphism") {
    CHECK(real_embedding_oracle(HyperHermitianMatrix::identity(3)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(real_embedding_oracle(diag2(2.0, 3.0)) == doctest::Approx(1296.0).epsilon(1e-12));

    // algebra morphism R(AB) = RA RB on random pairs
    for (int n = 1; n <= 3; ++n) {
        for (int t = 0; t < 10; ++t) {
            const QuatMatrix a = random_quat_matrix(n, 100 + static_cast<std::uint64_t>(t), 1.0);
            const QuatMatrix b = random_quat_matrix(n, 200 + static_cast<std::uint64_t>(t), 1.0);
            const Eigen::MatrixXd lhs = real_embedding(a * b);
            const Eigen::MatrixXd rhs = real_embedding(a) * real_embedding(b);
            CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST_CASE("scaling: det(R(lambda A)) = lambda^{4n} det(RA)") {
    const HyperHermitianMatrix a = random_hyperhermitian(2, 31337, 1.0);
    const double base = real_embedding_oracle(a);
    for (double lam : {0.5, 2.0, -1.5}) {
        const double scaled = real_embedding_oracle(a * lam);
        CHECK(scaled == doctest::Approx(std::pow(lam, 8) * base).epsilon(1e-9));
    }
}

TEST_CASE("complex embedding is Hermitian with paired eigenvalues") {
    for (int n = 1; n <= 4; ++n) {
        const HyperHermitianMatrix a = random_hyperhermitian(n, 555 + static_cast<std::uint64_t>(n), 1.0);
        const Eigen::MatrixXcd chi = complex_embedding(a);
        CHECK((chi - chi.adjoint()).norm() < 1e-12 * std::max(1.0, chi.norm()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(chi, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        for (int m = 0; m < n; ++m)
            CHECK(std::abs(ev[2 * m + 1] - ev[2 * m]) < 1e-8 * std::max(1.0, a.frobenius_norm()));
    }
}

TEST_CASE("chi is multiplicative on random quaternionic matrices") {
    const QuatMatrix a = random_quat_matrix(3, 777, 1.0);
    const QuatMatrix b = random_quat_matrix(3, 778, 1.0);
    const Eigen::MatrixXcd lhs = complex_embedding(a * b);
    const Eigen::MatrixXcd rhs = complex_embedding(a) * complex_embedding(b);
    CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
}

TEST_CASE("is_positive_definite") {
    CHECK(is_positive_definite(HyperHermitianMatrix::identity(2)));
    CHECK_FALSE(is_positive_definite(diag2(1.0, -1.0)));
    const HyperHermitianMatrix a = HyperHermitianMatrix::from_upper(
        2, {Quaternion::real(2), Quaternion::unit_j(), Quaternion::real(1)});
    CHECK(is_positive_definite(a));  // Moore det 2 - 1 = 1 > 0, leading entry positive
}

TEST_CASE("hyper-Hermitian invariant is enforced") {
    QuatMatrix bad(2);
    bad.at(0, 0) = Quaternion::real(1);
    bad.at(1, 1) = Quaternion::real(1);
    bad.at(0, 1) = Quaternion::unit_i();
    bad.at(1, 0) = Quaternion::unit_i();  // should be -i
    CHECK_THROWS_AS(HyperHermitianMatrix::from_entries(bad), NotHyperHermitian);
}

TEST_CASE("pairing ambiguity guard") {
    Eigen::VectorXd good(4);
    good << 1.0, 1.0 + 1e-9, 2.0, 2.0;
    CHECK(paired_spectrum_product(good, 1e-6) == doctest::Approx(2.0).epsilon(1e-8));
    Eigen::VectorXd bad(4);
    bad << 1.0, 1.5, 2.0, 2.0;
    CHECK_THROWS_AS(paired_spectrum_product(bad, 1e-6), PairingAmbiguous);
}

TEST_CASE("random_hyperhermitian: exact symmetry, determinism, diagonal statistics") {
    const HyperHermitianMatrix a = random_hyperhermitian(3, 999, 2.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(a.at(i, i).x == 0.0);
        for (int j = 0; j < 3; ++j) CHECK((a.at(i, j) - a.at(j, i).conj()).norm() == 0.0);
    }
    const HyperHermitianMatrix b = random_hyperhermitian(3, 999, 2.0);
    CHECK((a.at(0, 1) - b.at(0, 1)).norm() == 0.0);

    double mean = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const HyperHermitianMatrix m =
            random_hyperhermitian(2, static_cast<std::uint64_t>(t) * 7919 + 3, 1.0);
        mean += m.at(0, 0).t + m.at(1, 1).t;
    }
    mean /= 2.0 * draws;
    CHECK(std::abs(mean) < 5e-2);
}

TEST_CASE("moore determinant sign continuity along segments from Id") {
    // P along t -> (1-t) Id + t A stays continuous; adjacent samples differ
    // by a bounded step, so the pairing route induces no spurious sign flips.
    for (int n = 2; n <= 3; ++n) {
        const HyperHermitianMatrix a = random_hyperhermitian(n, 2024 + static_cast<std::uint64_t>(n), 1.0);
        double prev = 1.0;  // P(Id)
        double max_jump = 0.0;
        for (int s = 1; s <= 64; ++s) {
            const double t = static_cast<double>(s) / 64.0;
            const HyperHermitianMatrix m =
                HyperHermitianMatrix::identity(n) * (1.0 - t) + a * t;
            const double p = moore_det(m);
            max_jump = std::max(max_jump, std::abs(p - prev));
            prev = p;
        }
        const double scale = std::max(1.0, std::pow(1.0 + a.frobenius_norm(), n));
        CHECK(max_jump < 0.5 * scale);
    }
}

TEST_CASE("PD samples have positive Moore determinant") {
    for (int t = 0; t < 50; ++t) {
        const QuatMatrix b = random_quat_matrix(3, 4242 + static_cast<std::uint64_t>(t), 1.0);
        const HyperHermitianMatrix a =
            HyperHermitianMatrix::from_entries(b * b.conj_transpose(), 1e-8);
        CHECK(moore_det(a) >= 0.0);
        CHECK(is_positive_definite(a) == (moore_det(a) > 0.0));
    }
}
