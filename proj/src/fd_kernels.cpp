#include "qma/fd_kernels.hpp"

#include <cmath>

#include "qma/reduce.hpp"

namespace qma::fd {

StencilContext::StencilContext(const ScalarField& u)
    : dim_(u.dim()), N_(u.N()), inv_h2_(static_cast<double>(u.N()) * u.N()) {
    std::ptrdiff_t s = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        stride_[a] = s;
        s *= N_;
    }
}

void StencilContext::neighbors(std::size_t idx, NeighborOffsets& out) const {
    std::size_t rest = idx;
    for (int a = dim_ - 1; a >= 0; --a) {
        const int c = static_cast<int>(rest % static_cast<std::size_t>(N_));
        rest /= static_cast<std::size_t>(N_);
        out.plus[a] = (c + 1 < N_) ? stride_[a] : stride_[a] * (1 - N_);
        out.minus[a] = (c > 0) ? -stride_[a] : stride_[a] * (N_ - 1);
    }
}

namespace {

inline double second_diff(std::span<const double> v, std::size_t i,
                          const NeighborOffsets& nb, int a, double inv_h2) {
    const double c = v[i];
    return (v[i + nb.plus[a]] + v[i + nb.minus[a]] - 2.0 * c) * inv_h2;
}

inline double mixed_diff(std::span<const double> v, std::size_t i,
                         const NeighborOffsets& nb, int a, int b, double inv_h2) {
    const double pp = v[i + nb.plus[a] + nb.plus[b]];
    const double pm = v[i + nb.plus[a] + nb.minus[b]];
    const double mp = v[i + nb.minus[a] + nb.plus[b]];
    const double mm = v[i + nb.minus[a] + nb.minus[b]];
    return (pp - pm - mp + mm) * 0.25 * inv_h2;
}

void require_fine_enough(const ScalarField& u) {
    if (u.N() < 4) throw GridTooCoarse();
}

}  // namespace

Eigen::MatrixXd hessian_matrix_at(const ScalarField& u, std::size_t idx) {
    require_fine_enough(u);
    const StencilContext ctx(u);
    NeighborOffsets nb;
    ctx.neighbors(idx, nb);
    const int d = ctx.dim();
    const auto v = u.values();
    Eigen::MatrixXd s(d, d);
    for (int a = 0; a < d; ++a) {
        s(a, a) = second_diff(v, idx, nb, a, ctx.inv_h2());
        for (int b = a + 1; b < d; ++b) {
            const double m = mixed_diff(v, idx, nb, a, b, ctx.inv_h2());
            s(a, b) = m;
            s(b, a) = m;
        }
    }
    return s;
}

HyperHermitianMatrix hess_field_at(const ScalarField& u, std::size_t idx) {
    return hess_quaternionic(RealQuadraticForm(u.n(), hessian_matrix_at(u, idx), 1e-9));
}

HyperHermitianMatrix hess_field(const ScalarField& u, const MultiIndex& p) {
    return hess_field_at(u, u.index(p));
}

double hess_scalar_n1_at(const ScalarField& u, const StencilContext& ctx, std::size_t idx) {
    NeighborOffsets nb;
    ctx.neighbors(idx, nb);
    const auto v = u.values();
    double lap = 0.0;
    for (int a = 0; a < 4; ++a) lap += second_diff(v, idx, nb, a, ctx.inv_h2());
    return 0.25 * lap;
}

Hess2x2 hess2x2_n2_at(const ScalarField& u, const StencilContext& ctx, std::size_t idx) {
    NeighborOffsets nb;
    ctx.neighbors(idx, nb);
    const auto v = u.values();
    const double ih2 = ctx.inv_h2();

    double diag[8];
    for (int a = 0; a < 8; ++a) diag[a] = second_diff(v, idx, nb, a, ih2);
    // Cross-block mixed derivatives S[a][b] for a in block 1, b in block 2.
    double m[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[a][b] = mixed_diff(v, idx, nb, a, 4 + b, ih2);

    Hess2x2 out;
    out.a = 0.25 * (diag[0] + diag[1] + diag[2] + diag[3]);
    out.c = 0.25 * (diag[4] + diag[5] + diag[6] + diag[7]);
    // SU(2)-averaged off-diagonal quaternion (t,x,y,z components):
    out.q.t = 0.25 * (m[0][0] + m[1][1] + m[2][2] + m[3][3]);
    out.q.x = -0.25 * (m[0][1] - m[1][0] + m[2][3] - m[3][2]);
    out.q.y = -0.25 * (m[0][2] - m[1][3] - m[2][0] + m[3][1]);
    out.q.z = -0.25 * (m[0][3] + m[1][2] - m[2][1] - m[3][0]);
    return out;
}

void build_moore_state(const ScalarField& phi, MooreState& out, bool parallel) {
    require_fine_enough(phi);
    const int n = phi.n();
    if (n > 2) throw ConfigError("Moore state kernels support n in {1,2}");
    const std::size_t count = phi.size();
    out.n = n;
    out.ma.resize(count);
    if (n == 2) {
        out.mc.resize(count);
        out.qt.resize(count);
        out.qx.resize(count);
        out.qy.resize(count);
        out.qz.resize(count);
    }
    const StencilContext ctx(phi);
    if (n == 1) {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
            out.ma[i] = 1.0 + hess_scalar_n1_at(phi, ctx, static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            const Hess2x2 h = hess2x2_n2_at(phi, ctx, static_cast<std::size_t>(i));
            out.ma[i] = 1.0 + h.a;
            out.mc[i] = 1.0 + h.c;
            out.qt[i] = h.q.t;
            out.qx[i] = h.q.x;
            out.qy[i] = h.q.y;
            out.qz[i] = h.q.z;
        }
    }
}

void moore_density(const MooreState& st, std::span<double> out, bool parallel) {
    const std::size_t count = st.size();
    if (st.n == 1) {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
            out[i] = st.ma[i];
    } else {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            const double q2 = st.qt[i] * st.qt[i] + st.qx[i] * st.qx[i] +
                              st.qy[i] * st.qy[i] + st.qz[i] * st.qz[i];
            out[i] = st.ma[i] * st.mc[i] - q2;
        }
    }
}

double min_eigenvalue(const MooreState& st, bool parallel) {
    const std::size_t count = st.size();
    std::vector<double> eig(count);
    if (st.n == 1) {
        return par::min_val(st.ma);
    }
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        const double mid = 0.5 * (st.ma[i] + st.mc[i]);
        const double off = 0.5 * (st.ma[i] - st.mc[i]);
        const double q2 = st.qt[i] * st.qt[i] + st.qx[i] * st.qx[i] +
                          st.qy[i] * st.qy[i] + st.qz[i] * st.qz[i];
        eig[i] = mid - std::sqrt(off * off + q2);
    }
    return par::min_val(eig);
}

void moore_density_jacobian_apply(const MooreState& st, const ScalarField& delta,
                                  std::span<double> out, bool parallel) {
    const std::size_t count = st.size();
    const StencilContext ctx(delta);
    if (st.n == 1) {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
            out[i] = hess_scalar_n1_at(delta, ctx, static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            const Hess2x2 d = hess2x2_n2_at(delta, ctx, static_cast<std::size_t>(i));
            out[i] = st.mc[i] * d.a + st.ma[i] * d.c -
                     2.0 * (st.qt[i] * d.q.t + st.qx[i] * d.q.x + st.qy[i] * d.q.y +
                            st.qz[i] * d.q.z);
        }
    }
}

void moore_density_reference(const ScalarField& phi, std::span<double> out) {
    const HyperHermitianMatrix id = HyperHermitianMatrix::identity(phi.n());
    for (std::size_t i = 0; i < phi.size(); ++i)
        out[i] = moore_det(id + hess_field_at(phi, i));
}

PshReport is_psh(const ScalarField& u, const HyperHermitianMatrix& background,
                 double margin) {
    require_fine_enough(u);
    if (!is_positive_definite(background))
        throw PreconditionViolated("psh background must be positive definite");
    const int n = u.n();
    PshReport rep;

    const bool id_background =
        (background + HyperHermitianMatrix::scalar_diagonal(n, -1.0)).frobenius_norm() == 0.0;
    if (n <= 2 && id_background) {
        MooreState st;
        build_moore_state(u, st);
        const std::size_t count = st.size();
        std::vector<double> eig(count);
        if (n == 1) {
            rep.worst_margin = par::min_val(st.ma);
            std::size_t worst = 0;
            for (std::size_t i = 0; i < count; ++i)
                if (st.ma[i] == rep.worst_margin) { worst = i; break; }
            rep.worst_point = worst;
        } else {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
                const double mid = 0.5 * (st.ma[i] + st.mc[i]);
                const double off = 0.5 * (st.ma[i] - st.mc[i]);
                const double q2 = st.qt[i] * st.qt[i] + st.qx[i] * st.qx[i] +
                                  st.qy[i] * st.qy[i] + st.qz[i] * st.qz[i];
                eig[i] = mid - std::sqrt(off * off + q2);
            }
            rep.worst_margin = par::min_val(eig);
            for (std::size_t i = 0; i < count; ++i)
                if (eig[i] == rep.worst_margin) { rep.worst_point = i; break; }
        }
        rep.psh = rep.worst_margin >= margin;
        return rep;
    }

    // General route: eigenvalues of chi(background + Hess) per point.
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_point = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const HyperHermitianMatrix m = background + hess_field_at(u, i);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_embedding(m),
                                                           Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo < worst) {
            worst = lo;
            worst_point = i;
        }
    }
    rep.worst_margin = worst;
    rep.worst_point = worst_point;
    rep.psh = worst >= margin;
    return rep;
}

}  // namespace qma::fd
