#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "qma/errors.hpp"
#include "qma/quaternion.hpp"

namespace qma {

/// Dense n x n quaternionic matrix, row-major. General (non-Hermitian)
/// matrices are needed for the embedding-morphism checks and for building
/// positive-definite samples as B * B^H.
class QuatMatrix {
public:
    QuatMatrix() = default;
    explicit QuatMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n) {}

    int n() const { return n_; }
    Quaternion& at(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    const Quaternion& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }

    QuatMatrix conj_transpose() const;
    friend QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b);

private:
    int n_ = 0;
    std::vector<Quaternion> e_;
};

/// Hyper-Hermitian matrix: a_ji = conj(a_ij), diagonal real.
/// Validated at construction; moore_det re-validates against its own
/// tolerance before evaluating.
class HyperHermitianMatrix {
public:
    HyperHermitianMatrix() = default;

    /// Build from full entries; throws NotHyperHermitian beyond tolerance
    /// (relative to the Frobenius norm). The stored matrix is exactly
    /// symmetrized: a_ij <- (a_ij + conj(a_ji))/2.
    static HyperHermitianMatrix from_entries(const QuatMatrix& entries,
                                             double rel_tol = 1e-10);

    /// Trusted constructor for upper-triangle data (used by generators):
    /// the lower triangle is filled by conjugation, so the invariant holds
    /// exactly by construction.
    static HyperHermitianMatrix from_upper(int n, const std::vector<Quaternion>& upper);

    static HyperHermitianMatrix identity(int n);
    static HyperHermitianMatrix zero(int n) { return scalar_diagonal(n, 0.0); }
    static HyperHermitianMatrix scalar_diagonal(int n, double a);

    int n() const { return n_; }
    const Quaternion& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    double frobenius_norm() const;

    HyperHermitianMatrix& operator*=(double s);
    HyperHermitianMatrix& operator+=(const HyperHermitianMatrix& o);
    friend HyperHermitianMatrix operator*(HyperHermitianMatrix a, double s) { return a *= s; }
    friend HyperHermitianMatrix operator*(double s, HyperHermitianMatrix a) { return a *= s; }
    friend HyperHermitianMatrix operator+(HyperHermitianMatrix a, const HyperHermitianMatrix& b) {
        return a += b;
    }

    QuatMatrix as_quat_matrix() const;

private:
    int n_ = 0;
    std::vector<Quaternion> e_;
};

/// chi: Mat(n,H) -> Mat(2n,C) through the split q = z + w*j,
/// z = t + x*sqrt(-1), w = y + z*sqrt(-1). Algebra morphism; sends
/// hyper-Hermitian to complex Hermitian. Eigenvalues of chi(A) come in
/// coincident pairs.
Eigen::MatrixXcd complex_embedding(const QuatMatrix& a);
Eigen::MatrixXcd complex_embedding(const HyperHermitianMatrix& a);

/// 4x4 real matrix of left multiplication v -> q*v.
Eigen::Matrix4d left_mult_matrix(const Quaternion& q);
/// 4x4 real matrix of right multiplication v -> v*q.
Eigen::Matrix4d right_mult_matrix(const Quaternion& q);

/// ^R A: Mat(n,H) -> Mat(4n,R), blockwise left-multiplication embedding.
/// Algebra morphism; det(^R A) = moore_det(A)^4 on hyper-Hermitian A.
Eigen::MatrixXd real_embedding(const QuatMatrix& a);
Eigen::MatrixXd real_embedding(const HyperHermitianMatrix& a);

/// Moore determinant P(A): eigenvalues of chi(A) sorted ascending, paired
/// consecutively, product of one representative per pair. Normalized so
/// P(Id) = 1; homogeneous of degree n; restricts to the usual determinant
/// on complex Hermitian matrices.
///
/// Throws NotHyperHermitian (invariant violated beyond 1e-10 * ||A||) or
/// PairingAmbiguous (paired eigenvalues differ by more than 1e-6 * ||A||).
double moore_det(const HyperHermitianMatrix& a);

/// Pure pairing step on a sorted spectrum; exposed so the ambiguity guard
/// is testable without manufacturing a broken matrix.
double paired_spectrum_product(const Eigen::VectorXd& sorted_eigs, double pair_tol);

/// det(^R A), used only as the independent verification oracle for
/// moore_det(A)^4.
double real_embedding_oracle(const HyperHermitianMatrix& a);

/// True iff all eigenvalues of chi(A) are > 0.
bool is_positive_definite(const HyperHermitianMatrix& a);

/// Gaussian hyper-Hermitian sample: off-diagonal entries quaternion
/// Gaussian with deviation `scale`, diagonal real Gaussian. Deterministic
/// per seed; the invariant holds exactly by construction.
HyperHermitianMatrix random_hyperhermitian(int n, std::uint64_t seed, double scale);

/// Random general quaternionic matrix (Gaussian entries).
QuatMatrix random_quat_matrix(int n, std::uint64_t seed, double scale);

}  // namespace qma
