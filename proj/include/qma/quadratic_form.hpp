#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "qma/errors.hpp"
#include "qma/hyperhermitian.hpp"
#include "qma/quaternion.hpp"

namespace qma {

/// Symmetric real 4n x 4n matrix S of the quadratic form Q(h) = h^T S h
/// on H^n = R^{4n}. Coordinate order per quaternion factor a:
/// (t_a, x_a, y_a, z_a) at indices 4a..4a+3. Houses D^2 u at a point, the
/// SU(2) average <Q>_u and the complement Q_+ = Q - <Q>_u.
class RealQuadraticForm {
public:
    RealQuadraticForm() = default;
    RealQuadraticForm(int n, Eigen::MatrixXd S, double sym_tol = 1e-12);

    int n() const { return n_; }
    int dim() const { return 4 * n_; }
    const Eigen::MatrixXd& matrix() const { return S_; }
    double evaluate(const Eigen::VectorXd& h) const { return h.dot(S_ * h); }
    double evaluate(const QuaternionVector& v) const;

    RealQuadraticForm operator-(const RealQuadraticForm& o) const {
        return RealQuadraticForm(n_, S_ - o.S_, 1e100);
    }

private:
    int n_ = 0;
    Eigen::MatrixXd S_;
};

/// 4n x 4n real matrix of the right action v -> v o q on H^n.
Eigen::MatrixXd right_action_matrix(int n, const Quaternion& q);

/// Four-point SU(2) average of a quadratic form:
///   <Q>(x) = 1/4 (Q(x) + Q(x o I) + Q(x o J) + Q(x o K)).
/// The result is invariant under the right action of every unit quaternion.
RealQuadraticForm su2_average(const RealQuadraticForm& q);

/// Complement Q_+ = Q - <Q>_u; its su2_average vanishes.
RealQuadraticForm su2_complement(const RealQuadraticForm& q);

/// The hyper-Hermitian matrix A with Q_A(v) = sum_ij conj(v_i) a_ij v_j
/// equal to su2_average(Q) as a quadratic form; normalized so the scalar a
/// corresponds to a*|h|^2 for n = 1. This is the quaternionic Hessian when
/// Q = D^2 u at a point.
HyperHermitianMatrix hess_quaternionic(const RealQuadraticForm& q);

/// Inverse direction: the SU(2)-invariant real form of a hyper-Hermitian
/// matrix (equal to its real embedding, which the tests exercise).
RealQuadraticForm invariant_form(const HyperHermitianMatrix& a);

/// omega = sum_{l<k} M_lk dz_l ^ dz_k in flat I-holomorphic coordinates.
/// M is complex antisymmetric 2n x 2n. Outputs of ddJ satisfy the realness
/// condition J omega = conj(omega).
struct TwoFormI {
    int n = 0;
    Eigen::MatrixXcd M;
};

/// ddJ of a constant-coefficient quadratic form: the (2,0)-form
/// d dJ u = sum u_{z_l zbar_j} (J^-1)^j_k dz_l ^ dz_k with the fixed flat
/// J action on indices (see docs/conventions.md). Depends only on
/// su2_average(Q); annihilates the complement Q_+.
TwoFormI ddJ(const RealQuadraticForm& q);

/// Defect of the realness condition J omega = conj(omega); zero (to
/// roundoff) on every ddJ output.
double realness_defect(const TwoFormI& w);

/// Pfaffian of a complex antisymmetric matrix by recursive expansion.
/// Sign convention: the standard symplectic block matrix has Pfaffian +1.
std::complex<double> pfaffian(const Eigen::MatrixXcd& m);

/// Coefficient of dz_1 ^ ... ^ dz_2n in omega^n / n!, i.e. Pf(M).
std::complex<double> wedge_top_coefficient(const TwoFormI& w);

/// Measured ratio wedge_top_coefficient(ddJ(Q)) / moore_det(hess(Q)),
/// constant across strictly plurisubharmonic quadratics.
struct CalibrationConstant {
    int n = 0;
    double kappa = 0.0;           ///< measured common ratio
    double spread = 0.0;          ///< max relative disagreement across test forms
    double paper_value = 0.0;     ///< n!/4^n for comparison
    double discrepancy_factor() const { return kappa / paper_value; }
};

/// Computes kappa from u = sum |q_a|^2 and asserts the same ratio (to
/// 1e-9 relative) on >= 20 random strictly psh quadratics. Throws
/// CalibrationInconsistent when the ratios disagree, which signals a
/// J-convention or Pfaffian-sign error.
CalibrationConstant calibrate_kappa(int n, std::uint64_t seed = 2026, int samples = 24);

/// Random quadratic form; 'psh' shifts the spectrum so the SU(2) average
/// is safely positive definite.
RealQuadraticForm random_quadratic_form(int n, std::uint64_t seed, double scale = 1.0);
RealQuadraticForm random_psh_quadratic_form(int n, std::uint64_t seed, double scale = 1.0);

/// 2-jet of a function at a base point: value + gradient.h + 1/2 h^T S h.
struct TwoJet {
    int n = 0;
    Eigen::VectorXd base;
    double value = 0.0;
    Eigen::VectorXd gradient;
    RealQuadraticForm quadratic;  ///< D^2 of the jet (the raw Hessian matrix)

    double evaluate(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd h = x - base;
        return value + gradient.dot(h) + 0.5 * h.dot(quadratic.matrix() * h);
    }
};

/// Quadratic polynomial on R^{4n} extending a pluriharmonic 2-jet. Its
/// quaternionic Hessian vanishes identically (constant coefficients).
struct QuadraticFunction {
    TwoJet jet;
    double evaluate(const Eigen::VectorXd& x) const { return jet.evaluate(x); }
    RealQuadraticForm hessian_at_any_point() const { return jet.quadratic; }
};

/// Flat pluriharmonic jet extension: requires su2_average(jet.quadratic)
/// to vanish within tol (i.e. ddJ of the jet is zero at the base point);
/// the jet's own quadratic polynomial is then pluriharmonic on all of
/// R^{4n}. Throws JetNotPluriharmonic otherwise.
QuadraticFunction pluriharmonic_extend(const TwoJet& jet, double tol = 1e-10);

}  // namespace qma
