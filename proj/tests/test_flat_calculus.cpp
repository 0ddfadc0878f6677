#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qma/hyperhermitian.hpp"
#include "qma/quadratic_form.hpp"
#include "qma/quaternion.hpp"

using namespace qma;

namespace {

Eigen::MatrixXd random_symmetric(int d, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = g(gen);
    return 0.5 * (a + a.transpose().eval());
}

// Quaternionic Hessian through the Cauchy-Riemann-Fueter operators with
// the 1/2 normalization, H_ab = (d/dqbar_a)(d/dq_b) u, evaluated exactly
// on a quadratic with Hessian matrix S. Independent route used to pin the
// operator convention against the SU(2)-averaging route.
QuatMatrix fueter_hessian(int n, const Eigen::MatrixXd& s) {
    const Quaternion left[4] = {Quaternion::real(1), Quaternion::unit_i(),
                                Quaternion::unit_j(), Quaternion::unit_k()};
    const Quaternion right[4] = {Quaternion::real(1), -Quaternion::unit_i(),
                                 -Quaternion::unit_j(), -Quaternion::unit_k()};
    QuatMatrix h(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Quaternion acc{};
            for (int g = 0; g < 4; ++g)
                for (int d = 0; d < 4; ++d)
                    acc += (left[g] * right[d]) * s(4 * a + g, 4 * b + d);
            h.at(a, b) = acc * 0.25;
        }
    return h;
}

}  // namespace

TEST_CASE("su2_average: invariant form is fixed, t^2 averages to |h|^2/4") {
    const RealQuadraticForm iso(1, 2.0 * Eigen::Matrix4d::Identity(), 1e-12);
    CHECK((su2_average(iso).matrix() - iso.matrix()).norm() < 1e-14);

    Eigen::Matrix4d t2 = Eigen::Matrix4d::Zero();
    t2(0, 0) = 1.0;
    const RealQuadraticForm q(1, t2, 1e-12);
    const Eigen::MatrixXd avg = su2_average(q).matrix();
    CHECK((avg - 0.25 * Eigen::Matrix4d::Identity()).norm() < 1e-14);
}

TEST_CASE("su2_average is invariant under every unit right action") {
    const auto units = haar_sample_su2(404, 50);
    for (int n = 1; n <= 2; ++n) {
        const RealQuadraticForm q = random_quadratic_form(n, 17 + static_cast<std::uint64_t>(n));
        const Eigen::MatrixXd t = su2_average(q).matrix();
        for (const auto& L : units) {
            const Eigen::MatrixXd r = right_action_matrix(n, L);
            CHECK((r.transpose() * t * r - t).norm() < 1e-12 * std::max(1.0, t.norm()));
        }
    }
}

TEST_CASE("projection identity Q = <Q> + Q_+ and idempotency") {
    const RealQuadraticForm q = random_quadratic_form(2, 23);
    const RealQuadraticForm avg = su2_average(q);
    const RealQuadraticForm plus = su2_complement(q);
    CHECK((q.matrix() - avg.matrix() - plus.matrix()).norm() < 1e-12);
    CHECK(su2_average(plus).matrix().norm() < 1e-12);
    CHECK((su2_average(avg).matrix() - avg.matrix()).norm() < 1e-12);
}

TEST_CASE("hess_quaternionic: scalar examples") {
    // u = |q|^2 has D^2 u = 2 Id and quaternionic Hessian 2
    const RealQuadraticForm iso(1, 2.0 * Eigen::Matrix4d::Identity(), 1e-12);
    const HyperHermitianMatrix h = hess_quaternionic(iso);
    CHECK(h.at(0, 0).t == doctest::Approx(2.0).epsilon(1e-14));

    // u = t^2 - x^2 averages to zero
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 0) = 2.0;
    s(1, 1) = -2.0;
    CHECK(hess_quaternionic(RealQuadraticForm(1, s, 1e-12)).frobenius_norm() < 1e-14);

    // n = 2 block extension
    const RealQuadraticForm iso2(2, 2.0 * Eigen::MatrixXd::Identity(8, 8), 1e-12);
    const HyperHermitianMatrix h2 = hess_quaternionic(iso2);
    CHECK((h2 + HyperHermitianMatrix::scalar_diagonal(2, -2.0)).frobenius_norm() < 1e-13);
}

TEST_CASE("hess_quaternionic is linear and exactly hyper-Hermitian") {
    const RealQuadraticForm a = random_quadratic_form(2, 31);
    const RealQuadraticForm b = random_quadratic_form(2, 37);
    const HyperHermitianMatrix ha = hess_quaternionic(a);
    const HyperHermitianMatrix hb = hess_quaternionic(b);
    const HyperHermitianMatrix hsum =
        hess_quaternionic(RealQuadraticForm(2, a.matrix() + 2.0 * b.matrix(), 1e-9));
    const HyperHermitianMatrix expect = ha + hb * 2.0;
    double defect = (hsum + expect * -1.0).frobenius_norm();
    CHECK(defect < 1e-12 * std::max(1.0, expect.frobenius_norm()));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK((ha.at(i, j) - ha.at(j, i).conj()).norm() == 0.0);
}

TEST_CASE("invariant_form round trip: Q_A of hess(Q) equals <Q>") {
    for (int n = 1; n <= 3; ++n) {
        const RealQuadraticForm q = random_quadratic_form(n, 41 + static_cast<std::uint64_t>(n));
        const Eigen::MatrixXd lhs = invariant_form(hess_quaternionic(q)).matrix();
        const Eigen::MatrixXd rhs = su2_average(q).matrix();
        CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("Fueter-operator route equals the SU(2)-averaging route") {
    for (int n = 1; n <= 3; ++n) {
        const Eigen::MatrixXd s = random_symmetric(4 * n, 53 + static_cast<std::uint64_t>(n));
        const QuatMatrix fueter = fueter_hessian(n, s);
        const HyperHermitianMatrix avg = hess_quaternionic(RealQuadraticForm(n, s, 1e-9));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK((fueter.at(i, j) - avg.at(i, j)).norm() <
                      1e-12 * std::max(1.0, avg.frobenius_norm()));
    }
}

TEST_CASE("ddJ: u = |q|^2 gives a positive multiple of dz1^dz2") {
    const RealQuadraticForm iso(1, 2.0 * Eigen::Matrix4d::Identity(), 1e-12);
    const TwoFormI w = ddJ(iso);
    CHECK(w.M(0, 1).real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(w.M(0, 1).imag()) < 1e-14);
    CHECK((w.M + w.M.transpose()).norm() < 1e-14);
    CHECK(realness_defect(w) < 1e-14);
}

TEST_CASE("ddJ kills the complement and factors through the average") {
    for (int n = 1; n <= 3; ++n) {
        const RealQuadraticForm q = random_quadratic_form(n, 61 + static_cast<std::uint64_t>(n));
        const double scale = std::max(1.0, q.matrix().norm());
        CHECK(ddJ(su2_complement(q)).M.norm() < 1e-12 * scale);
        CHECK((ddJ(q).M - ddJ(su2_average(q)).M).norm() < 1e-12 * scale);
        CHECK(realness_defect(ddJ(q)) < 1e-12 * scale);
    }
}

TEST_CASE("pfaffian: normalization, block multiplicativity, determinant oracle") {
    Eigen::MatrixXcd j2(2, 2);
    j2 << 0, 1, -1, 0;
    CHECK(pfaffian(j2).real() == doctest::Approx(1.0));

    Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Zero(4, 4);
    blocks(0, 1) = 2.5;
    blocks(1, 0) = -2.5;
    blocks(2, 3) = -3.0;
    blocks(3, 2) = 3.0;
    CHECK(pfaffian(blocks).real() == doctest::Approx(2.5 * -3.0));

    std::mt19937_64 gen(71);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const int d = 2 * (1 + t % 3);
        Eigen::MatrixXcd a(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) a(i, j) = std::complex<double>(g(gen), g(gen));
        const Eigen::MatrixXcd m = a - a.transpose().eval();
        const std::complex<double> pf = pfaffian(m);
        const std::complex<double> det = m.determinant();
        CHECK(std::abs(pf * pf - det) < 1e-9 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("calibration constant: constancy, nonzero, documented factor vs n!/4^n") {
    for (int n = 1; n <= 3; ++n) {
        const CalibrationConstant k = calibrate_kappa(n, 81 + static_cast<std::uint64_t>(n));
        CHECK(k.spread <= 1e-9);
        CHECK(k.kappa != 0.0);
        CHECK(k.kappa == doctest::Approx(1.0).epsilon(1e-9));
        // fixed convention factor relative to the n!/4^n normalization
        double fact = 1.0, pow4 = 1.0;
        for (int i = 1; i <= n; ++i) fact *= i;
        for (int i = 0; i < n; ++i) pow4 *= 4.0;
        CHECK(k.paper_value == doctest::Approx(fact / pow4));
        CHECK(k.discrepancy_factor() == doctest::Approx(pow4 / fact).epsilon(1e-9));
    }
}

TEST_CASE("density identity with the measured kappa on psh forms") {
    for (int n = 1; n <= 3; ++n) {
        const CalibrationConstant k = calibrate_kappa(n, 97);
        for (int t = 0; t < 20; ++t) {
            const RealQuadraticForm q =
                random_psh_quadratic_form(n, 1000 + static_cast<std::uint64_t>(97 * n + t));
            const double top = wedge_top_coefficient(ddJ(q)).real();
            const double det = moore_det(hess_quaternionic(q));
            CHECK(std::abs(top - k.kappa * det) < 1e-9 * std::max(1.0, std::abs(det)));
        }
    }
}

TEST_CASE("pluriharmonic jet extension") {
    // jet of t^2 - x^2 at the origin
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 0) = 2.0;
    s(1, 1) = -2.0;
    TwoJet jet;
    jet.n = 1;
    jet.base = Eigen::VectorXd::Zero(4);
    jet.gradient = Eigen::VectorXd::Zero(4);
    jet.quadratic = RealQuadraticForm(1, s, 1e-12);
    const QuadraticFunction f = pluriharmonic_extend(jet);
    CHECK(hess_quaternionic(f.hessian_at_any_point()).frobenius_norm() < 1e-12);

    Eigen::VectorXd x(4);
    x << 0.3, -0.2, 0.5, 0.1;
    CHECK(f.evaluate(x) == doctest::Approx(0.3 * 0.3 - 0.2 * 0.2).epsilon(1e-14));

    // linear jets extend to themselves (the quadratic part vanishes)
    TwoJet lin;
    lin.n = 1;
    lin.base = Eigen::VectorXd::Zero(4);
    lin.value = 2.0;
    lin.gradient = Eigen::VectorXd::Ones(4);
    lin.quadratic = RealQuadraticForm(1, Eigen::Matrix4d::Zero(), 1e-12);
    const QuadraticFunction g = pluriharmonic_extend(lin);
    CHECK(g.evaluate(x) == doctest::Approx(2.0 + x.sum()));

    // Q_+ of a random form is accepted, a nonzero average is rejected
    const RealQuadraticForm q = random_quadratic_form(1, 103);
    TwoJet plus = jet;
    plus.quadratic = su2_complement(q);
    CHECK_NOTHROW(pluriharmonic_extend(plus));

    TwoJet avg = jet;
    avg.quadratic = su2_average(random_psh_quadratic_form(1, 107));
    CHECK_THROWS_AS(pluriharmonic_extend(avg), JetNotPluriharmonic);
}

TEST_CASE("jet evaluation is exact on quadratics") {
    std::mt19937_64 gen(109);
    std::normal_distribution<double> g(0.0, 1.0);
    TwoJet jet;
    jet.n = 1;
    jet.base = Eigen::VectorXd::NullaryExpr(4, [&](int) { return g(gen); });
    jet.value = g(gen);
    jet.gradient = Eigen::VectorXd::NullaryExpr(4, [&](int) { return g(gen); });
    jet.quadratic = RealQuadraticForm(1, random_symmetric(4, 113), 1e-9);
    Eigen::VectorXd h = Eigen::VectorXd::NullaryExpr(4, [&](int) { return g(gen); });
    const double lhs = jet.evaluate(jet.base + h);
    const double rhs =
        jet.value + jet.gradient.dot(h) + 0.5 * h.dot(jet.quadratic.matrix() * h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("non-symmetric input is rejected") {
    Eigen::Matrix4d bad = Eigen::Matrix4d::Zero();
    bad(0, 1) = 1.0;  // no symmetric partner
    CHECK_THROWS_AS(RealQuadraticForm(1, bad, 1e-12), NotSymmetric);
}
