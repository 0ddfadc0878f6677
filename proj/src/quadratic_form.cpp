#include "qma/quadratic_form.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qma {

RealQuadraticForm::RealQuadraticForm(int n, Eigen::MatrixXd S, double sym_tol)
    : n_(n), S_(std::move(S)) {
    if (S_.rows() != 4 * n || S_.cols() != 4 * n)
        throw NotSymmetric("quadratic form matrix has wrong dimensions");
    const double defect = (S_ - S_.transpose()).norm();
    if (defect > sym_tol * std::max(1.0, S_.norm())) {
        std::ostringstream os;
        os << "symmetry defect " << defect;
        throw NotSymmetric(os.str());
    }
    S_ = 0.5 * (S_ + S_.transpose().eval());
}

double RealQuadraticForm::evaluate(const QuaternionVector& v) const {
    Eigen::VectorXd h(dim());
    for (int a = 0; a < n_; ++a) {
        h[4 * a + 0] = v[a].t;
        h[4 * a + 1] = v[a].x;
        h[4 * a + 2] = v[a].y;
        h[4 * a + 3] = v[a].z;
    }
    return evaluate(h);
}

Eigen::MatrixXd right_action_matrix(int n, const Quaternion& q) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    const Eigen::Matrix4d r = right_mult_matrix(q);
    for (int a = 0; a < n; ++a) m.block<4, 4>(4 * a, 4 * a) = r;
    return m;
}

RealQuadraticForm su2_average(const RealQuadraticForm& q) {
    const int n = q.n();
    const Eigen::MatrixXd& s = q.matrix();
    const Eigen::MatrixXd ri = right_action_matrix(n, Quaternion::unit_i());
    const Eigen::MatrixXd rj = right_action_matrix(n, Quaternion::unit_j());
    const Eigen::MatrixXd rk = right_action_matrix(n, Quaternion::unit_k());
    Eigen::MatrixXd t = 0.25 * (s + ri.transpose() * s * ri + rj.transpose() * s * rj +
                                rk.transpose() * s * rk);
    return RealQuadraticForm(n, std::move(t), 1e-9);
}

RealQuadraticForm su2_complement(const RealQuadraticForm& q) {
    return RealQuadraticForm(q.n(), q.matrix() - su2_average(q).matrix(), 1e-9);
}

HyperHermitianMatrix hess_quaternionic(const RealQuadraticForm& q) {
    const RealQuadraticForm avg = su2_average(q);
    const Eigen::MatrixXd& t = avg.matrix();
    const int n = q.n();
    // Entry a_ij of the hyper-Hermitian matrix with Q_A = <Q>:
    //   a_ij = T[t_i,t_j] - T[t_i,x_j] i - T[t_i,y_j] j - T[t_i,z_j] k.
    std::vector<Quaternion> upper;
    upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const int ti = 4 * i, tj = 4 * j;
            upper.push_back({t(ti, tj), -t(ti, tj + 1), -t(ti, tj + 2), -t(ti, tj + 3)});
        }
    return HyperHermitianMatrix::from_upper(n, upper);
}

RealQuadraticForm invariant_form(const HyperHermitianMatrix& a) {
    return RealQuadraticForm(a.n(), real_embedding(a), 1e-9);
}

namespace {

// Wirtinger rows of the flat identification: z_{2a} = t_a + i x_a,
// z_{2a+1} = y_a - i z_a (0-based rows). Row l gives d/dz_l in terms of
// the real partials.
Eigen::MatrixXcd wirtinger_matrix(int n) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(2 * n, 4 * n);
    const std::complex<double> I(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        w(2 * a, 4 * a + 0) = 0.5;
        w(2 * a, 4 * a + 1) = -0.5 * I;
        w(2 * a + 1, 4 * a + 2) = 0.5;
        w(2 * a + 1, 4 * a + 3) = 0.5 * I;
    }
    return w;
}

// (J^-1)^j_k acting on dzbar: block-diagonal [[0,1],[-1,0]] per factor.
Eigen::MatrixXcd j_inverse_matrix(int n) {
    Eigen::MatrixXcd jm = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        jm(2 * a, 2 * a + 1) = 1.0;
        jm(2 * a + 1, 2 * a) = -1.0;
    }
    return jm;
}

// J on dz: J dz_{2a} = -dzbar_{2a+1}, J dz_{2a+1} = dzbar_{2a}.
Eigen::MatrixXcd j_on_dz_matrix(int n) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        k(2 * a, 2 * a + 1) = -1.0;
        k(2 * a + 1, 2 * a) = 1.0;
    }
    return k;
}

}  // namespace

TwoFormI ddJ(const RealQuadraticForm& q) {
    const int n = q.n();
    const Eigen::MatrixXcd w = wirtinger_matrix(n);
    // Mixed complex Hessian G_lj = d^2 u / dz_l dzbar_j.
    const Eigen::MatrixXcd g = w * q.matrix() * w.adjoint();
    const Eigen::MatrixXcd c = g * j_inverse_matrix(n);
    TwoFormI out;
    out.n = n;
    out.M = c - c.transpose().eval();
    return out;
}

double realness_defect(const TwoFormI& w) {
    const Eigen::MatrixXcd k = j_on_dz_matrix(w.n);
    // J omega has dzbar-coefficient matrix K^T M K; conj(omega) has conj(M).
    return (k.transpose() * w.M * k - w.M.conjugate()).norm();
}

std::complex<double> pfaffian(const Eigen::MatrixXcd& m) {
    const int d = static_cast<int>(m.rows());
    if (d % 2 != 0) return 0.0;
    if (d == 0) return 1.0;
    if (d == 2) return m(0, 1);
    // Expansion along the first row: Pf(M) = sum_k (-1)^k M_{0,k} Pf(M^{0k}).
    std::complex<double> acc(0.0, 0.0);
    for (int k = 1; k < d; ++k) {
        if (m(0, k) == std::complex<double>(0.0, 0.0)) continue;
        Eigen::MatrixXcd minor(d - 2, d - 2);
        int rr = 0;
        for (int r = 1; r < d; ++r) {
            if (r == k) continue;
            int cc = 0;
            for (int c = 1; c < d; ++c) {
                if (c == k) continue;
                minor(rr, cc++) = m(r, c);
            }
            ++rr;
        }
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        acc += sign * m(0, k) * pfaffian(minor);
    }
    return acc;
}

std::complex<double> wedge_top_coefficient(const TwoFormI& w) { return pfaffian(w.M); }

RealQuadraticForm random_quadratic_form(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd a(4 * n, 4 * n);
    for (int i = 0; i < 4 * n; ++i)
        for (int j = 0; j < 4 * n; ++j) a(i, j) = gauss(gen);
    return RealQuadraticForm(n, 0.5 * (a + a.transpose().eval()), 1e-6);
}

RealQuadraticForm random_psh_quadratic_form(int n, std::uint64_t seed, double scale) {
    RealQuadraticForm q = random_quadratic_form(n, seed, scale);
    const Eigen::MatrixXd t = su2_average(q).matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    const double lift = std::max(0.0, -es.eigenvalues().minCoeff()) + 0.25 * scale;
    return RealQuadraticForm(
        n, q.matrix() + lift * Eigen::MatrixXd::Identity(4 * n, 4 * n), 1e-9);
}

CalibrationConstant calibrate_kappa(int n, std::uint64_t seed, int samples) {
    auto ratio_of = [](const RealQuadraticForm& q) {
        const std::complex<double> top = wedge_top_coefficient(ddJ(q));
        const double det = moore_det(hess_quaternionic(q));
        return std::pair<std::complex<double>, double>(top, det);
    };

    // Reference function u = sum_a |q_a|^2, i.e. S = 2 Id.
    const RealQuadraticForm ref(
        n, 2.0 * Eigen::MatrixXd::Identity(4 * n, 4 * n), 1e-12);
    auto [ref_top, ref_det] = ratio_of(ref);
    if (std::abs(ref_top.imag()) > 1e-9 * std::abs(ref_top.real()))
        throw CalibrationInconsistent("top coefficient of reference form is not real");
    const double kappa = ref_top.real() / ref_det;

    double spread = 0.0;
    std::uint64_t state = seed;
    for (int s = 0; s < samples; ++s) {
        const RealQuadraticForm q = random_psh_quadratic_form(n, splitmix64(state));
        auto [top, det] = ratio_of(q);
        if (std::abs(det) < 1e-8) continue;  // near-degenerate draw carries no information
        if (std::abs(top.imag()) > 1e-9 * std::max(1.0, std::abs(top.real()))) {
            std::ostringstream os;
            os << "complex top coefficient " << top.real() << " + " << top.imag() << "i";
            throw CalibrationInconsistent(os.str());
        }
        const double r = top.real() / det;
        spread = std::max(spread, std::abs(r - kappa) / std::abs(kappa));
    }
    if (spread > 1e-9) {
        std::ostringstream os;
        os << "kappa spread " << spread << " for n = " << n
           << " (J convention or Pfaffian sign error)";
        throw CalibrationInconsistent(os.str());
    }

    CalibrationConstant out;
    out.n = n;
    out.kappa = kappa;
    out.spread = spread;
    double fact = 1.0, pow4 = 1.0;
    for (int i = 1; i <= n; ++i) fact *= i;
    for (int i = 0; i < n; ++i) pow4 *= 4.0;
    out.paper_value = fact / pow4;
    return out;
}

QuadraticFunction pluriharmonic_extend(const TwoJet& jet, double tol) {
    const Eigen::MatrixXd avg = su2_average(jet.quadratic).matrix();
    const double defect = avg.norm();
    if (defect > tol * std::max(1.0, jet.quadratic.matrix().norm())) {
        std::ostringstream os;
        os << "su2 average of jet quadratic has norm " << defect;
        throw JetNotPluriharmonic(os.str());
    }
    return QuadraticFunction{jet};
}

}  // namespace qma
