#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "qma/hyperhermitian.hpp"
#include "qma/quadratic_form.hpp"
#include "qma/scalar_field.hpp"

namespace qma::fd {

/// Signed flat-index offsets of the +1/-1 periodic neighbors of a point,
/// per axis. Computed once per point, reused by every stencil.
struct NeighborOffsets {
    std::array<std::ptrdiff_t, kMaxAxes> plus{};
    std::array<std::ptrdiff_t, kMaxAxes> minus{};
};

class StencilContext {
public:
    explicit StencilContext(const ScalarField& u);
    int dim() const { return dim_; }
    int N() const { return N_; }
    double inv_h2() const { return inv_h2_; }
    void neighbors(std::size_t idx, NeighborOffsets& out) const;

private:
    int dim_, N_;
    double inv_h2_;
    std::array<std::ptrdiff_t, kMaxAxes> stride_{};
};

/// Full 4n x 4n discrete Hessian D^2 u at a lattice point: centered second
/// differences on the diagonal, the 4-point cross stencil
/// (f(+,+) - f(+,-) - f(-,+) + f(-,-)) / (4 h^2) off it. Exact on
/// lattice-sampled quadratics. This is the serial reference route.
Eigen::MatrixXd hessian_matrix_at(const ScalarField& u, std::size_t idx);

/// Quaternionic Hessian at a lattice point: discrete D^2 u followed by
/// hess_quaternionic. Throws GridTooCoarse for N < 4.
HyperHermitianMatrix hess_field(const ScalarField& u, const MultiIndex& p);
HyperHermitianMatrix hess_field_at(const ScalarField& u, std::size_t idx);

/// n = 1 fast path: Hess_H u = (laplacian u) / 4.
double hess_scalar_n1_at(const ScalarField& u, const StencilContext& ctx, std::size_t idx);

/// n = 2 fast path: the 2x2 hyper-Hermitian Hessian [[a, q], [conj(q), c]].
struct Hess2x2 {
    double a = 0.0, c = 0.0;
    Quaternion q{};
};
Hess2x2 hess2x2_n2_at(const ScalarField& u, const StencilContext& ctx, std::size_t idx);

/// Per-point Moore state of Id + Hess_H(phi), struct-of-arrays layout.
/// For n = 1 only `ma` is used; for n = 2 all seven components.
struct MooreState {
    int n = 0;
    std::vector<double> ma, mc, qt, qx, qy, qz;
    std::size_t size() const { return ma.size(); }
};

/// OpenMP kernels. `parallel = false` runs the identical loops serially
/// (the benchmark target compares the two).
void build_moore_state(const ScalarField& phi, MooreState& out, bool parallel = true);

/// det(Id + Hess_H phi) per point from a prebuilt state.
void moore_density(const MooreState& st, std::span<double> out, bool parallel = true);

/// Smallest eigenvalue of Id + Hess_H phi over all points (psh margin).
double min_eigenvalue(const MooreState& st, bool parallel = true);

/// Directional derivative of the Moore density at the state: for n = 1
/// d det = Hess_H(delta); for n = 2 d det = mc*da + ma*dc - 2 Re(conj(q) dq).
void moore_density_jacobian_apply(const MooreState& st, const ScalarField& delta,
                                  std::span<double> out, bool parallel = true);

/// Serial reference for the fast kernels: general-route density
/// moore_det(Id + hess_field_at) evaluated point by point.
void moore_density_reference(const ScalarField& phi, std::span<double> out);

/// Plurisubharmonicity of u against a positive-definite background:
/// background + Hess_H u must be positive semi-definite (margin >= eps) at
/// every lattice point. Fast paths for n in {1,2}; general route otherwise.
struct PshReport {
    bool psh = false;
    double worst_margin = 0.0;
    std::size_t worst_point = 0;
};
PshReport is_psh(const ScalarField& u, const HyperHermitianMatrix& background,
                 double margin = 0.0);

}  // namespace qma::fd
