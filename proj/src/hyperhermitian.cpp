#include "qma/hyperhermitian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qma {

QuatMatrix QuatMatrix::conj_transpose() const {
    QuatMatrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out.at(j, i) = at(i, j).conj();
    return out;
}

QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
    const int n = a.n();
    QuatMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Quaternion s{};
            for (int k = 0; k < n; ++k) s += a.at(i, k) * b.at(k, j);
            out.at(i, j) = s;
        }
    return out;
}

HyperHermitianMatrix HyperHermitianMatrix::from_entries(const QuatMatrix& entries,
                                                        double rel_tol) {
    const int n = entries.n();
    double norm_sq = 0.0, defect_sq = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            norm_sq += entries.at(i, j).norm_sq();
            const Quaternion d = entries.at(i, j) - entries.at(j, i).conj();
            defect_sq += d.norm_sq();
        }
    const double norm = std::sqrt(norm_sq);
    if (std::sqrt(defect_sq) > rel_tol * std::max(norm, 1e-300)) {
        std::ostringstream os;
        os << "hyper-Hermitian defect " << std::sqrt(defect_sq) << " exceeds " << rel_tol
           << " * ||A|| = " << rel_tol * norm;
        throw NotHyperHermitian(os.str());
    }
    HyperHermitianMatrix out;
    out.n_ = n;
    out.e_.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Quaternion s = (entries.at(i, j) + entries.at(j, i).conj()) * 0.5;
            if (i == j) s = Quaternion::real(s.t);
            out.e_[static_cast<std::size_t>(i) * n + j] = s;
        }
    return out;
}

HyperHermitianMatrix HyperHermitianMatrix::from_upper(int n,
                                                      const std::vector<Quaternion>& upper) {
    HyperHermitianMatrix out;
    out.n_ = n;
    out.e_.resize(static_cast<std::size_t>(n) * n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Quaternion q = upper[k++];
            if (i == j) q = Quaternion::real(q.t);
            out.e_[static_cast<std::size_t>(i) * n + j] = q;
            out.e_[static_cast<std::size_t>(j) * n + i] = q.conj();
        }
    return out;
}

HyperHermitianMatrix HyperHermitianMatrix::identity(int n) { return scalar_diagonal(n, 1.0); }

HyperHermitianMatrix HyperHermitianMatrix::scalar_diagonal(int n, double a) {
    HyperHermitianMatrix out;
    out.n_ = n;
    out.e_.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) out.e_[static_cast<std::size_t>(i) * n + i] = Quaternion::real(a);
    return out;
}

double HyperHermitianMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& q : e_) s += q.norm_sq();
    return std::sqrt(s);
}

HyperHermitianMatrix& HyperHermitianMatrix::operator*=(double s) {
    for (auto& q : e_) q *= s;
    return *this;
}

HyperHermitianMatrix& HyperHermitianMatrix::operator+=(const HyperHermitianMatrix& o) {
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

QuatMatrix HyperHermitianMatrix::as_quat_matrix() const {
    QuatMatrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out.at(i, j) = at(i, j);
    return out;
}

namespace {

// 2x2 complex block of q = z + w*j: [[z, w], [-conj(w), conj(z)]].
// Multiplicative, and conjugation goes to the Hermitian transpose.
inline void put_block(Eigen::MatrixXcd& m, int i, int j, const Quaternion& q) {
    const std::complex<double> z(q.t, q.x), w(q.y, q.z);
    m(2 * i, 2 * j) = z;
    m(2 * i, 2 * j + 1) = w;
    m(2 * i + 1, 2 * j) = -std::conj(w);
    m(2 * i + 1, 2 * j + 1) = std::conj(z);
}

template <typename M>
Eigen::MatrixXcd chi_impl(const M& a) {
    const int n = a.n();
    Eigen::MatrixXcd m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) put_block(m, i, j, a.at(i, j));
    return m;
}

}  // namespace

Eigen::MatrixXcd complex_embedding(const QuatMatrix& a) { return chi_impl(a); }
Eigen::MatrixXcd complex_embedding(const HyperHermitianMatrix& a) { return chi_impl(a); }

Eigen::Matrix4d left_mult_matrix(const Quaternion& q) {
    Eigen::Matrix4d m;
    m << q.t, -q.x, -q.y, -q.z,
         q.x,  q.t, -q.z,  q.y,
         q.y,  q.z,  q.t, -q.x,
         q.z, -q.y,  q.x,  q.t;
    return m;
}

Eigen::Matrix4d right_mult_matrix(const Quaternion& q) {
    Eigen::Matrix4d m;
    m << q.t, -q.x, -q.y, -q.z,
         q.x,  q.t,  q.z, -q.y,
         q.y, -q.z,  q.t,  q.x,
         q.z,  q.y, -q.x,  q.t;
    return m;
}

namespace {

template <typename M>
Eigen::MatrixXd real_embedding_impl(const M& a) {
    const int n = a.n();
    Eigen::MatrixXd m(4 * n, 4 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.block<4, 4>(4 * i, 4 * j) = left_mult_matrix(a.at(i, j));
    return m;
}

void check_hyperhermitian(const HyperHermitianMatrix& a, double rel_tol) {
    const int n = a.n();
    double norm_sq = 0.0, defect_sq = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            norm_sq += a.at(i, j).norm_sq();
            const Quaternion d = a.at(i, j) - a.at(j, i).conj();
            defect_sq += d.norm_sq();
        }
    if (std::sqrt(defect_sq) > rel_tol * std::max(std::sqrt(norm_sq), 1e-300))
        throw NotHyperHermitian();
}

}  // namespace

Eigen::MatrixXd real_embedding(const QuatMatrix& a) { return real_embedding_impl(a); }
Eigen::MatrixXd real_embedding(const HyperHermitianMatrix& a) { return real_embedding_impl(a); }

double paired_spectrum_product(const Eigen::VectorXd& sorted_eigs, double pair_tol) {
    const int pairs = static_cast<int>(sorted_eigs.size()) / 2;
    double p = 1.0;
    for (int m = 0; m < pairs; ++m) {
        const double lo = sorted_eigs[2 * m], hi = sorted_eigs[2 * m + 1];
        if (std::abs(hi - lo) > pair_tol) {
            std::ostringstream os;
            os << "eigenvalue pair (" << lo << ", " << hi << ") differs by "
               << std::abs(hi - lo) << " > " << pair_tol;
            throw PairingAmbiguous(os.str());
        }
        p *= 0.5 * (lo + hi);
    }
    return p;
}

double moore_det(const HyperHermitianMatrix& a) {
    check_hyperhermitian(a, 1e-10);
    if (a.n() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_embedding(a),
                                                       Eigen::EigenvaluesOnly);
    return paired_spectrum_product(es.eigenvalues(), 1e-6 * a.frobenius_norm());
}

double real_embedding_oracle(const HyperHermitianMatrix& a) {
    check_hyperhermitian(a, 1e-10);
    return real_embedding(a).determinant();
}

bool is_positive_definite(const HyperHermitianMatrix& a) {
    check_hyperhermitian(a, 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_embedding(a),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

HyperHermitianMatrix random_hyperhermitian(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    std::vector<Quaternion> upper;
    upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (i == j) {
                upper.push_back(Quaternion::real(gauss(gen)));
            } else {
                upper.push_back({gauss(gen), gauss(gen), gauss(gen), gauss(gen)});
            }
        }
    return HyperHermitianMatrix::from_upper(n, upper);
}

QuatMatrix random_quat_matrix(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    QuatMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.at(i, j) = {gauss(gen), gauss(gen), gauss(gen), gauss(gen)};
    return out;
}

}  // namespace qma
