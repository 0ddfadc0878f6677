#include <doctest.h>

#include <cmath>
#include <random>

#include "qma/quaternion.hpp"

using namespace qma;

TEST_CASE("defining relations i*j = k, squares = -1") {
    const Quaternion i = Quaternion::unit_i(), j = Quaternion::unit_j(),
                     k = Quaternion::unit_k();
    CHECK((i * j - k).norm() == 0.0);
    CHECK((j * i + k).norm() == 0.0);
    CHECK((i * i + Quaternion::real(1)).norm() == 0.0);
    CHECK((j * j + Quaternion::real(1)).norm() == 0.0);
    CHECK((k * k + Quaternion::real(1)).norm() == 0.0);
}

TEST_CASE("(1+i)(1-i) = 2") {
    const Quaternion a{1, 1, 0, 0}, b{1, -1, 0, 0};
    const Quaternion p = a * b;
    CHECK(p.t == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 0.0);
}

TEST_CASE("(1+2i)(3j) = 3j + 6k by bilinearity") {
    const Quaternion a{1, 2, 0, 0}, b{0, 0, 3, 0};
    const Quaternion p = a * b;
    CHECK(p.t == 0.0);
    CHECK(p.x == 0.0);
    CHECK(p.y == doctest::Approx(3.0));
    CHECK(p.z == doctest::Approx(6.0));
}

TEST_CASE("conjugation is an involution and reverses products") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const Quaternion q{g(gen), g(gen), g(gen), g(gen)};
        const Quaternion p{g(gen), g(gen), g(gen), g(gen)};
        CHECK((q.conj().conj() - q).norm() == 0.0);
        CHECK(((q * p).conj() - p.conj() * q.conj()).norm() < 1e-12);
    }
}

TEST_CASE("norm multiplicativity over 1e4 random pairs") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const Quaternion q{g(gen), g(gen), g(gen), g(gen)};
        const Quaternion p{g(gen), g(gen), g(gen), g(gen)};
        worst = std::max(worst, std::abs((q * p).norm() - q.norm() * p.norm()));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("imaginary directions square to -1") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        double a1 = g(gen), a2 = g(gen), a3 = g(gen);
        const double r = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
        if (r < 1e-6) continue;
        const ImaginaryDirection dir{a1 / r, a2 / r, a3 / r};
        const Quaternion la = dir.as_quaternion();
        CHECK((la * la + Quaternion::real(1)).norm() < 1e-12);
    }
}

TEST_CASE("right action: identity, i on real 1, composition") {
    const QuaternionVector v{{1, 0, 0, 0}};
    const QuaternionVector vi = right_act(v, Quaternion::unit_i());
    CHECK(vi[0].t == 0.0);
    CHECK(vi[0].x == 1.0);

    CHECK((right_act(v, Quaternion::real(1))[0] - v[0]).norm() == 0.0);

    std::mt19937_64 gen(17);
    std::normal_distribution<double> g(0.0, 1.0);
    QuaternionVector w{{g(gen), g(gen), g(gen), g(gen)}, {g(gen), g(gen), g(gen), g(gen)}};
    const auto lhs = right_act(right_act(w, Quaternion::unit_i()), Quaternion::unit_j());
    const auto rhs = right_act(w, Quaternion::unit_i() * Quaternion::unit_j());
    for (std::size_t c = 0; c < w.size(); ++c) CHECK((lhs[c] - rhs[c]).norm() < 1e-14);
}

TEST_CASE("unit right action preserves vector norm") {
    std::mt19937_64 gen(19);
    std::normal_distribution<double> g(0.0, 1.0);
    const auto units = haar_sample_su2(23, 200);
    for (const auto& q : units) {
        QuaternionVector v{{g(gen), g(gen), g(gen), g(gen)},
                           {g(gen), g(gen), g(gen), g(gen)}};
        CHECK(std::abs(euclidean_norm(right_act(v, q)) - euclidean_norm(v)) < 1e-12);
    }
}

TEST_CASE("haar sampling: unit norm, determinism, symmetry") {
    const auto a = haar_sample_su2(42, 100000);
    for (std::size_t i = 0; i < 100; ++i) CHECK(std::abs(a[i].norm() - 1.0) < 1e-12);
    double worst = 0.0;
    for (const auto& q : a) worst = std::max(worst, std::abs(q.norm() - 1.0));
    CHECK(worst < 1e-12);

    const auto b = haar_sample_su2(42, 100000);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        identical = identical && a[i].t == b[i].t && a[i].x == b[i].x && a[i].y == b[i].y &&
                    a[i].z == b[i].z;
    CHECK(identical);

    double mean_t = 0.0;
    for (const auto& q : a) mean_t += q.t;
    mean_t /= static_cast<double>(a.size());
    CHECK(std::abs(mean_t) < 5e-3);
}
