#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qma/fd_kernels.hpp"
#include "qma/scalar_field.hpp"

namespace qma::calabi {

/// Quaternionic Calabi problem (Id + Hess_H phi charge) on the flat torus
/// (R/Z)^{4n}: moore_det(Id + Hess_H phi) = A e^F pointwise, with the
/// normalization constant A solved from discrete mass balance.
struct TorusProblem {
    int n = 1;
    int N = 8;
    ScalarField F;  ///< datum; e^F is precomputed by the solver
};

struct SolverConfig {
    double tol = 1e-8;          ///< residual sup-norm target (1e-6 for n = 2)
    int max_iters = 50;
    double margin = 1e-3;       ///< psh margin kept by the line search
    double lin_tol = 1e-10;     ///< relative tolerance of inner linear solves
    int lin_max_iters = 400;
    bool quiet = true;
    static SolverConfig defaults_for(int n) {
        SolverConfig c;
        c.tol = (n == 1) ? 1e-8 : 1e-6;
        return c;
    }
};

enum class SolveStatus { Converged, MaxIterationsExceeded, NotPsh, LinearSolveStalled };

std::string to_string(SolveStatus s);

struct SolveReport {
    ScalarField phi;            ///< normalized so max phi = 0 exactly
    double A = 1.0;
    std::vector<double> residual_history;
    int iterations = 0;
    double phi_sup = 0.0;       ///< ||phi||_inf under the max-0 normalization
    double phi_l1 = 0.0;
    double psh_margin = 0.0;    ///< min eigenvalue of Id + Hess_H phi
    std::size_t max_location = 0;
    double mass_balance_defect = 0.0;
    int continuation_stages = 1;
    SolveStatus status = SolveStatus::Converged;
    std::string failure_detail;
    bool converged() const { return status == SolveStatus::Converged; }
};

/// Pointwise residual moore_det(Id + Hess_H phi) - A e^F. Throws NotPsh
/// when Id + Hess_H phi loses positive definiteness (worst point and
/// margin attached).
ScalarField residual(const TorusProblem& problem, const ScalarField& phi, double A);

/// Damped Newton with mass-balance A updates, mean-zero gauge, FFT
/// preconditioned BiCGStab inner solves and automatic continuation in the
/// scale of F when the direct solve loses psh margin.
SolveReport solve(const TorusProblem& problem, const SolverConfig& cfg,
                  const ScalarField* initial_guess = nullptr);

/// Throws the typed error matching a failed report.
void ensure_converged(const SolveReport& rep);

/// Max pairwise sup-deviation of solutions from distinct seeded starts,
/// after mean alignment.
double uniqueness_check(const TorusProblem& problem, const SolverConfig& cfg,
                        const std::vector<std::uint64_t>& seeds);

/// Random smooth (band-limited) start used by uniqueness_check. The
/// amplitude bounds the total curvature |Hess_H| of the start, keeping
/// Id + Hess_H positive definite.
ScalarField random_smooth_field(int n, int N, std::uint64_t seed, double amplitude = 0.3);

struct SweepRecord {
    double s = 0.0;
    double normF_inf = 0.0;
    double normphi_inf = 0.0;
    double normphi_L1 = 0.0;
    double A = 1.0;
    int iters = 0;
    double residual = 0.0;
};

struct EnvelopeFit {
    double c1 = 0.0, c2 = 0.0;      ///< upper envelope y <= c1 + c2 * exp(4 ||F||_inf)
    double c1_least_squares = 0.0;  ///< before the upper-envelope shift
    double rms_residual = 0.0;
    std::vector<double> slack;      ///< c1 + c2 x_i - y_i, all >= 0 by construction
};

struct SweepResult {
    std::vector<SweepRecord> records;
    EnvelopeFit sup_fit;  ///< for ||phi||_inf
    EnvelopeFit l1_fit;   ///< for ||phi||_L1
};

/// Solves F_s = s * base_F for each scale (sorted, deduplicated), records
/// norms, and fits the upper envelope c1 + c2 exp(4 ||F_s||_inf).
SweepResult c0_sweep(const ScalarField& base_F, std::vector<double> scales,
                     const SolverConfig& cfg);

/// Trigonometric polynomial sum_m amp cos(2 pi k.xi + phase): closed-form
/// values and Hessians for manufactured problems and oracles.
struct TrigMode {
    std::array<int, kMaxAxes> k{};
    double amp = 0.0;
    double phase = 0.0;
};

struct TrigPoly {
    int n = 1;
    std::vector<TrigMode> modes;
    double value(std::span<const double> xi) const;
    Eigen::MatrixXd hessian(std::span<const double> xi) const;
};

ScalarField sample_trig(const TrigPoly& p, int N);

/// F := log moore_det(Id + Hess_H phi*) with the *analytic* Hessian of
/// phi*, so the discrete solution differs from phi* by the stencil error.
TorusProblem manufactured_problem(const TrigPoly& phi_star, int N);

/// Direct discrete Fourier solve of the n = 1 linear equation
/// laplacian(phi)/4 = A e^F - 1. Independent oracle for the Newton path.
ScalarField fourier_oracle_n1(const TorusProblem& problem);

}  // namespace qma::calabi
