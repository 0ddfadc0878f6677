#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "qma/calabi.hpp"
#include "qma/fd_kernels.hpp"
#include "qma/fft_poisson.hpp"
#include "qma/quadratic_form.hpp"
#include "qma/reduce.hpp"
#include "qma/scalar_field.hpp"

using namespace qma;

TEST_CASE("scalar field indexing wraps periodically") {
    ScalarField f(1, 8);
    MultiIndex c{};
    c[0] = 3; c[1] = 7; c[2] = 0; c[3] = 5;
    const std::size_t i = f.index(c);
    MultiIndex wrapped{};
    wrapped[0] = 3 + 8; wrapped[1] = 7 - 8; wrapped[2] = 0; wrapped[3] = 5 + 16;
    CHECK(f.index(wrapped) == i);
    MultiIndex back{};
    f.coords(i, back);
    for (int a = 0; a < 4; ++a) CHECK(back[a] == c[a]);
}

TEST_CASE("field save/load round trip") {
    const ScalarField f = ScalarField::sample(1, 6, [](std::span<const double> xi) {
        return std::sin(2.0 * std::numbers::pi * xi[0]) + 0.5 * xi[2];
    });
    const std::string path = "/tmp/qma_test_field.bin";
    save_field(f, path);
    const ScalarField g = load_field(path);
    REQUIRE(g.size() == f.size());
    CHECK(g.n() == f.n());
    CHECK(g.N() == f.N());
    bool identical = true;
    for (std::size_t i = 0; i < f.size(); ++i) identical = identical && f[i] == g[i];
    CHECK(identical);
    std::remove(path.c_str());
}

TEST_CASE("hess_field: constants give zero, lattice quadratics are exact") {
    const ScalarField zero = ScalarField::zeros(1, 8);
    MultiIndex center{};
    for (int a = 0; a < 4; ++a) center[a] = 4;
    CHECK(fd::hess_field(zero, center).frobenius_norm() == 0.0);

    // quadratic sampled on the lattice: centered stencils are exact at
    // points whose stencil does not cross the wrap
    std::mt19937_64 gen(211);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n = 1; n <= 2; ++n) {
        const int d = 4 * n;
        Eigen::MatrixXd s(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s(i, j) = g(gen);
        s = (0.5 * (s + s.transpose().eval())).eval();
        const ScalarField u = ScalarField::sample(n, 8, [&](std::span<const double> xi) {
            double v = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) v += 0.5 * s(a, b) * xi[a] * xi[b];
            return v;
        });
        MultiIndex p{};
        for (int a = 0; a < d; ++a) p[a] = 4;
        const HyperHermitianMatrix lhs = fd::hess_field(u, p);
        const HyperHermitianMatrix rhs = hess_quaternionic(RealQuadraticForm(n, s, 1e-9));
        CHECK((lhs + rhs * -1.0).frobenius_norm() < 1e-10 * std::max(1.0, s.norm()));
    }
}

TEST_CASE("hess_field converges at second order on trigonometric fields") {
    auto entry_error = [](int N) {
        const ScalarField u = ScalarField::sample(1, N, [](std::span<const double> xi) {
            return std::sin(2.0 * std::numbers::pi * xi[0]);
        });
        // analytic Hess_H = -(2 pi)^2 sin(2 pi t) / 4 at t = 1/4 (lattice point N/4)
        MultiIndex p{};
        p[0] = N / 4;
        const double numeric = fd::hess_field(u, p).at(0, 0).t;
        const double exact = -std::pow(2.0 * std::numbers::pi, 2) / 4.0;
        return std::abs(numeric - exact);
    };
    const double e1 = entry_error(8), e2 = entry_error(16);
    CHECK(e1 / e2 >= std::pow(2.0, 1.9));
}

TEST_CASE("grid too coarse is rejected") {
    const ScalarField tiny = ScalarField::zeros(1, 3);
    MultiIndex p{};
    CHECK_THROWS_AS(fd::hess_field(tiny, p), GridTooCoarse);
}

TEST_CASE("fast kernels match the serial reference route") {
    for (int n = 1; n <= 2; ++n) {
        const ScalarField phi = calabi::random_smooth_field(n, 6, 999 + static_cast<std::uint64_t>(n), 0.5);
        fd::MooreState st;
        fd::build_moore_state(phi, st);
        std::vector<double> fast(phi.size());
        fd::moore_density(st, fast);
        std::vector<double> ref(phi.size());
        fd::moore_density_reference(phi, ref);
        double worst = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            worst = std::max(worst, std::abs(fast[i] - ref[i]));
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("serial and OpenMP kernel paths produce identical bits") {
    const ScalarField phi = calabi::random_smooth_field(2, 5, 424242, 0.4);
    fd::MooreState serial_state, parallel_state;
    fd::build_moore_state(phi, serial_state, false);
    fd::build_moore_state(phi, parallel_state, true);
    bool identical = true;
    for (std::size_t i = 0; i < serial_state.size(); ++i) {
        identical = identical && serial_state.ma[i] == parallel_state.ma[i] &&
                    serial_state.mc[i] == parallel_state.mc[i] &&
                    serial_state.qt[i] == parallel_state.qt[i];
    }
    CHECK(identical);

    std::vector<double> det_serial(phi.size()), det_parallel(phi.size());
    fd::moore_density(serial_state, det_serial, false);
    fd::moore_density(parallel_state, det_parallel, true);
    for (std::size_t i = 0; i < phi.size(); ++i)
        identical = identical && det_serial[i] == det_parallel[i];
    CHECK(identical);
}

TEST_CASE("deterministic reductions are thread-count independent") {
    std::mt19937_64 gen(31415);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(100003);
    for (auto& x : v) x = g(gen);

    const int saved = par::max_threads();
    par::set_threads(1);
    const double s1 = par::sum(v);
    const double d1 = par::dot(v, v);
    par::set_threads(4);
    const double s4 = par::sum(v);
    const double d4 = par::dot(v, v);
    par::set_threads(saved);
    CHECK(s1 == s4);
    CHECK(d1 == d4);
}

TEST_CASE("pairwise tree sum matches plain summation") {
    std::vector<double> partials{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> copy = partials;
    CHECK(par::pairwise_tree(copy) == doctest::Approx(15.0));
}

TEST_CASE("is_psh: background identity examples") {
    const HyperHermitianMatrix id1 = HyperHermitianMatrix::identity(1);

    CHECK(fd::is_psh(ScalarField::zeros(1, 8), id1).psh);

    // u = -|q|^2 sampled: Hessian -2 at the center beats the background
    const ScalarField neg = ScalarField::sample(1, 8, [](std::span<const double> xi) {
        double s = 0.0;
        for (double x : xi) s += (x - 0.5) * (x - 0.5);
        return -s;
    });
    CHECK_FALSE(fd::is_psh(neg, id1).psh);

    // u = 0.1 sin(2 pi t1): |Hess| <= 0.1 (2 pi)^2 / 4 < 1
    const ScalarField wave = ScalarField::sample(1, 8, [](std::span<const double> xi) {
        return 0.1 * std::sin(2.0 * std::numbers::pi * xi[0]);
    });
    const auto rep = fd::is_psh(wave, id1);
    CHECK(rep.psh);
    CHECK(rep.worst_margin > 0.0);
    CHECK(rep.worst_margin < 1.0);
}

TEST_CASE("is_psh rejects an indefinite background") {
    const HyperHermitianMatrix bad = HyperHermitianMatrix::from_upper(
        1, {Quaternion::real(-1.0)});
    CHECK_THROWS_AS(fd::is_psh(ScalarField::zeros(1, 8), bad), PreconditionViolated);
}

TEST_CASE("quarter-laplacian FFT inverse solves the discrete equation") {
    const int N = 8;
    const ScalarField rhs_field = ScalarField::sample(1, N, [](std::span<const double> xi) {
        return std::cos(2.0 * std::numbers::pi * xi[0]) +
               0.3 * std::sin(2.0 * std::numbers::pi * (xi[1] + xi[3]));
    });
    fd::QuarterLaplacianInverse inv(1, N);
    ScalarField phi(1, N);
    inv.apply_inverse(rhs_field.values(), phi.values());

    // apply (1/4) discrete laplacian back and compare to the projected rhs
    fd::MooreState st;
    fd::build_moore_state(phi, st);
    const double mean_rhs = rhs_field.mean();
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double lap_quarter = st.ma[i] - 1.0;
        worst = std::max(worst, std::abs(lap_quarter - (rhs_field[i] - mean_rhs)));
    }
    CHECK(worst < 1e-11);
    CHECK(std::abs(phi.mean()) < 1e-12);
}
