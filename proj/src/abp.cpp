#include "qma/abp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qma/fd_kernels.hpp"
#include "qma/hyperhermitian.hpp"
#include "qma/quadratic_form.hpp"
#include "qma/reduce.hpp"

namespace qma::abp {

namespace {

std::size_t vertex_count(int n, int N) {
    std::size_t s = 1;
    for (int a = 0; a < 4 * n; ++a) s *= static_cast<std::size_t>(N + 1);
    return s;
}

}  // namespace

BoxField::BoxField(int n, int N, double side)
    : n_(n), N_(N), side_(side), values_(vertex_count(n, N), 0.0) {
    if (N < 4) throw GridTooCoarse();
    if (side <= 0.0) throw ConfigError("box side must be positive");
}

BoxField BoxField::sample(int n, int N, double side,
                          const std::function<double(std::span<const double>)>& f) {
    BoxField out(n, N, side);
    const int d = out.dim();
    MultiIndex c{};
    std::array<double, kMaxAxes> x{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coords(i, c);
        for (int a = 0; a < d; ++a) x[a] = out.coordinate(c[a]);
        out.values_[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
    }
    return out;
}

std::size_t BoxField::index(const MultiIndex& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a)
        idx = idx * static_cast<std::size_t>(N_ + 1) + static_cast<std::size_t>(c[a]);
    return idx;
}

void BoxField::coords(std::size_t idx, MultiIndex& c) const {
    for (int a = dim() - 1; a >= 0; --a) {
        c[a] = static_cast<int>(idx % static_cast<std::size_t>(N_ + 1));
        idx /= static_cast<std::size_t>(N_ + 1);
    }
}

bool BoxField::is_boundary(const MultiIndex& c) const {
    for (int a = 0; a < dim(); ++a)
        if (c[a] == 0 || c[a] == N_) return true;
    return false;
}

bool BoxField::is_interior(const MultiIndex& c) const { return !is_boundary(c); }

Eigen::VectorXd BoxField::gradient_at(const MultiIndex& c) const {
    const int d = dim();
    Eigen::VectorXd g(d);
    MultiIndex p = c, m = c;
    const double inv_2h = 0.5 / h();
    for (int a = 0; a < d; ++a) {
        p[a] = c[a] + 1;
        m[a] = c[a] - 1;
        g[a] = (values_[index(p)] - values_[index(m)]) * inv_2h;
        p[a] = c[a];
        m[a] = c[a];
    }
    return g;
}

Eigen::MatrixXd BoxField::hessian_at(const MultiIndex& c) const {
    const int d = dim();
    const double inv_h2 = 1.0 / (h() * h());
    Eigen::MatrixXd s(d, d);
    MultiIndex w = c;
    const double uc = values_[index(c)];
    for (int a = 0; a < d; ++a) {
        w[a] = c[a] + 1;
        const double up = values_[index(w)];
        w[a] = c[a] - 1;
        const double um = values_[index(w)];
        w[a] = c[a];
        s(a, a) = (up + um - 2.0 * uc) * inv_h2;
    }
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            w[a] = c[a] + 1; w[b] = c[b] + 1;
            const double pp = values_[index(w)];
            w[b] = c[b] - 1;
            const double pm = values_[index(w)];
            w[a] = c[a] - 1;
            const double mm = values_[index(w)];
            w[b] = c[b] + 1;
            const double mp = values_[index(w)];
            w[a] = c[a]; w[b] = c[b];
            const double v = (pp - pm - mp + mm) * 0.25 * inv_h2;
            s(a, b) = v;
            s(b, a) = v;
        }
    return s;
}

double BoxField::sup_abs() const { return par::sup_abs(values_); }

double BoxField::l1_norm() const {
    return par::pow_sum(values_, 1.0) * std::pow(h(), dim());
}

double BoxField::min_value() const { return par::min_val(values_); }

namespace {

std::vector<std::size_t> interior_points(const BoxField& u) {
    std::vector<std::size_t> out;
    MultiIndex c{};
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.coords(i, c);
        if (u.is_interior(c)) out.push_back(i);
    }
    return out;
}

// Physical coordinates flattened per point, SoA-free but contiguous.
std::vector<double> point_coords(const BoxField& u) {
    const int d = u.dim();
    std::vector<double> xs(u.size() * static_cast<std::size_t>(d));
    MultiIndex c{};
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.coords(i, c);
        for (int a = 0; a < d; ++a) xs[i * d + a] = u.coordinate(c[a]);
    }
    return xs;
}

// Quaternionic Hessian at an interior point; closed forms for n <= 2.
double moore_density_at(const BoxField& u, const MultiIndex& c) {
    if (u.n() == 1) {
        const double inv_h2 = 1.0 / (u.h() * u.h());
        MultiIndex w = c;
        const double uc = u[u.index(c)];
        double lap = 0.0;
        for (int a = 0; a < 4; ++a) {
            w[a] = c[a] + 1;
            const double up = u[u.index(w)];
            w[a] = c[a] - 1;
            const double um = u[u.index(w)];
            w[a] = c[a];
            lap += (up + um - 2.0 * uc) * inv_h2;
        }
        return 0.25 * lap;
    }
    const Eigen::MatrixXd s = u.hessian_at(c);
    const HyperHermitianMatrix h = hess_quaternionic(RealQuadraticForm(u.n(), s, 1e-9));
    if (u.n() == 2) return h.at(0, 0).t * h.at(1, 1).t - h.at(0, 1).norm_sq();
    return moore_det(h);
}

double min_hess_eigenvalue_at(const BoxField& u, const MultiIndex& c) {
    if (u.n() == 1) return moore_density_at(u, c);
    const Eigen::MatrixXd s = u.hessian_at(c);
    const HyperHermitianMatrix h = hess_quaternionic(RealQuadraticForm(u.n(), s, 1e-9));
    if (u.n() == 2) {
        const double a = h.at(0, 0).t, cc = h.at(1, 1).t;
        const double q2 = h.at(0, 1).norm_sq();
        return 0.5 * (a + cc) - std::sqrt(0.25 * (a - cc) * (a - cc) + q2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_embedding(h),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

ContactSet contact_set(const BoxField& u) {
    const int d = u.dim();
    const double sup = u.sup_abs();
    const double slack = 1e-10 * sup;
    const std::vector<std::size_t> interior = interior_points(u);
    const std::vector<double> xs = point_coords(u);
    const std::size_t total = u.size();

    std::vector<char> in_gamma(interior.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(interior.size()); ++ii) {
        const std::size_t i = interior[static_cast<std::size_t>(ii)];
        MultiIndex c{};
        u.coords(i, c);
        const Eigen::VectorXd g = u.gradient_at(c);
        double cx = u[i];
        for (int a = 0; a < d; ++a) cx -= g[a] * xs[i * d + a];
        const double threshold = cx - slack;
        bool ok = true;
        for (std::size_t y = 0; y < total; ++y) {
            double w = u[y];
            const double* xy = &xs[y * d];
            for (int a = 0; a < d; ++a) w -= g[a] * xy[a];
            if (w < threshold) {
                ok = false;
                break;
            }
        }
        in_gamma[static_cast<std::size_t>(ii)] = ok ? 1 : 0;
    }

    ContactSet out;
    out.slack = slack;
    double worst = 0.0;
    MultiIndex c{};
    for (std::size_t ii = 0; ii < interior.size(); ++ii) {
        if (!in_gamma[ii]) continue;
        out.points.push_back(interior[ii]);
        u.coords(interior[ii], c);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.hessian_at(c),
                                                          Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    out.worst_hessian_eigenvalue = worst;
    return out;
}

PointwiseDetReport pointwise_det_inequality(int n, int samples, std::uint64_t seed,
                                            bool include_isotropic) {
    if (n != 1 && n != 2) throw ConfigError("pointwise determinant inequality: n in {1,2}");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = 4 * n;

    PointwiseDetReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.pinned = (n == 1) ? kPointwiseDetC1 : kPointwiseDetC2;

    auto ratio_of = [&](const Eigen::MatrixXd& s) {
        const double det = s.determinant();
        const double p = moore_det(hess_quaternionic(RealQuadraticForm(n, s, 1e-9)));
        if (p < 1e-12) return 0.0;  // zero-eigenvalue edge: det also ~ 0
        const double p4 = p * p * p * p;
        return det / p4;
    };

    double max_ratio = 0.0;
    for (int t = 0; t < samples; ++t) {
        Eigen::MatrixXd g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = gauss(gen);
        max_ratio = std::max(max_ratio, ratio_of(g.transpose() * g));
    }
    if (include_isotropic) {
        max_ratio = std::max(max_ratio, ratio_of(Eigen::MatrixXd::Identity(d, d)));
        max_ratio = std::max(
            max_ratio, ratio_of(3.0 * Eigen::MatrixXd::Identity(d, d)));
        Eigen::MatrixXd g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = gauss(gen);
        const Eigen::MatrixXd near_iso =
            Eigen::MatrixXd::Identity(d, d) + 0.005 * (g + g.transpose());
        max_ratio = std::max(max_ratio, ratio_of(near_iso));
    }
    rep.max_ratio = max_ratio;
    const double headroom = (n == 1) ? 1e-9 : 1e-6;
    rep.within_pinned = max_ratio <= rep.pinned * (1.0 + headroom);
    return rep;
}

std::vector<double> moore_density_box(const BoxField& u) {
    std::vector<double> f(u.size(), 0.0);
    const std::vector<std::size_t> interior = interior_points(u);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(interior.size()); ++ii) {
        MultiIndex c{};
        const std::size_t i = interior[static_cast<std::size_t>(ii)];
        u.coords(i, c);
        f[i] = moore_density_at(u, c);
    }
    return f;
}

double psh_margin_box(const BoxField& u) {
    const std::vector<std::size_t> interior = interior_points(u);
    std::vector<double> margins(interior.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(interior.size()); ++ii) {
        MultiIndex c{};
        u.coords(interior[static_cast<std::size_t>(ii)], c);
        margins[static_cast<std::size_t>(ii)] = min_hess_eigenvalue_at(u, c);
    }
    return par::min_val(margins);
}

namespace {

struct DensityStats {
    double f_inf = 0.0;
    double f_l4 = 0.0;
};

DensityStats density_stats(const BoxField& u, const std::vector<double>& f) {
    DensityStats st;
    st.f_inf = par::sup_abs(f);
    st.f_l4 = std::pow(par::pow_sum(f, 4.0) * std::pow(u.h(), u.dim()), 0.25);
    return st;
}

void check_proposition_preconditions(const BoxField& u, double psh_margin) {
    const double sup = u.sup_abs();
    const double tol = 1e-10 * std::max(1.0, sup);
    MultiIndex c{};
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > tol) throw PreconditionViolated("u must be <= 0 on D");
        u.coords(i, c);
        if (u.is_boundary(c) && std::abs(u[i]) > tol)
            throw PreconditionViolated("u must vanish on the boundary shell");
    }
    const double margin = psh_margin_box(u);
    if (margin < psh_margin - 1e-9 * std::max(1.0, sup)) {
        std::ostringstream os;
        os << "psh margin " << margin << " below required " << psh_margin;
        throw PreconditionViolated(os.str());
    }
}

}  // namespace

AbpReport verify_key_proposition(const BoxField& u, double psh_margin) {
    check_proposition_preconditions(u, psh_margin);

    AbpReport rep;
    rep.sup_u = u.sup_abs();
    rep.diam = u.diameter();
    rep.u_l1 = u.l1_norm();

    const ContactSet gamma = contact_set(u);
    rep.contact_points = gamma.points.size();
    const double cell = std::pow(u.h(), u.dim());
    double integral = 0.0;
    MultiIndex c{};
    for (std::size_t i : gamma.points) {
        u.coords(i, c);
        const double det = u.hessian_at(c).determinant();
        if (det > 0.0) integral += det * cell;
    }
    rep.contact_integral = integral;

    const std::vector<double> f = moore_density_box(u);
    const DensityStats st = density_stats(u, f);
    rep.f_inf = st.f_inf;
    rep.f_l4 = st.f_l4;

    const double d = u.dim();
    rep.abp_rhs = kAbpOracleC * rep.diam * std::pow(integral, 1.0 / d);
    rep.prop_rhs =
        kPropositionC * rep.diam * std::pow(st.f_l4, 1.0 / static_cast<double>(u.n()));
    rep.abp_holds = rep.sup_u <= rep.abp_rhs * (1.0 + 1e-12) + 1e-14;
    rep.prop_holds = rep.sup_u <= rep.prop_rhs * (1.0 + 1e-12) + 1e-14;

    const double abp_div = rep.diam * std::pow(integral, 1.0 / d);
    rep.c_abp_empirical = (abp_div > 1e-14) ? rep.sup_u / abp_div : 0.0;
    const double prop_div = rep.diam * std::pow(st.f_l4, 1.0 / static_cast<double>(u.n()));
    rep.c_prop_empirical = (prop_div > 1e-14) ? rep.sup_u / prop_div : 0.0;
    return rep;
}

AbpReport verify_key_lemma(const BoxField& u, double a, double psh_margin) {
    if (a <= 0.0) throw PreconditionViolated("sublevel offset a must be positive");
    const double max_u = par::max_val(u.values());
    if (max_u >= 0.0) throw PreconditionViolated("u must be negative on D");
    const double margin = psh_margin_box(u);
    if (margin < psh_margin - 1e-12)
        throw PreconditionViolated("u must be plurisubharmonic with the required margin");

    const double inf_u = u.min_value();
    const double level = inf_u + a;

    MultiIndex c{};
    std::vector<std::size_t> sublevel;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < level) {
            u.coords(i, c);
            if (u.is_boundary(c))
                throw SublevelTouchesBoundary("sublevel {u < inf u + a} reaches the boundary shell");
            sublevel.push_back(i);
        }
    }
    if (sublevel.empty()) throw PreconditionViolated("sublevel set is empty");

    AbpReport rep;
    rep.a = a;
    rep.sup_u = u.sup_abs();
    rep.diam = u.diameter();
    rep.u_l1 = u.l1_norm();
    rep.sublevel_points = sublevel.size();

    // Euclidean diameter of the lattice sublevel set.
    const std::vector<double> xs = point_coords(u);
    const int d = u.dim();
    double diam2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : diam2)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(sublevel.size()); ++ii) {
        for (std::size_t jj = static_cast<std::size_t>(ii) + 1; jj < sublevel.size(); ++jj) {
            const double* xa = &xs[sublevel[static_cast<std::size_t>(ii)] * d];
            const double* xb = &xs[sublevel[jj] * d];
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += (xa[k] - xb[k]) * (xa[k] - xb[k]);
            diam2 = std::max(diam2, s);
        }
    }
    rep.sublevel_diam = std::sqrt(diam2);

    const std::vector<double> f = moore_density_box(u);
    const DensityStats st = density_stats(u, f);
    rep.f_inf = st.f_inf;
    rep.f_l4 = st.f_l4;

    // Proposition applied on D' = {v < 0}, v = u - inf u - a: ||v||_inf(D') = a.
    const double cell = std::pow(u.h(), u.dim());
    double f4_sub = 0.0;
    for (std::size_t i : sublevel) f4_sub += std::pow(std::abs(f[i]), 4.0) * cell;
    const double f_l4_sub = std::pow(f4_sub, 0.25);
    rep.prop_rhs = kPropositionC * rep.sublevel_diam *
                   std::pow(f_l4_sub, 1.0 / static_cast<double>(u.n()));
    rep.prop_holds = a <= rep.prop_rhs * (1.0 + 1e-12) + 1e-14;
    const double prop_div =
        rep.sublevel_diam * std::pow(f_l4_sub, 1.0 / static_cast<double>(u.n()));
    rep.c_prop_empirical = (prop_div > 1e-14) ? a / prop_div : 0.0;

    const double dn = static_cast<double>(u.dim());
    const double ratio = std::pow(rep.diam, dn) / std::pow(a, dn);
    const double f4 = std::pow(st.f_inf, 4.0);
    rep.lemma_rhs = a + kKeyLemmaC * ratio * rep.u_l1 * f4;
    rep.lemma_holds = rep.sup_u <= rep.lemma_rhs * (1.0 + 1e-12);
    const double denom = ratio * rep.u_l1 * f4;
    rep.c_lemma_empirical =
        (denom > 1e-14 && rep.sup_u > a) ? (rep.sup_u - a) / denom : 0.0;
    return rep;
}

BoxField quadratic_well(int n, int N, double side, const Eigen::VectorXd& center, double r2) {
    return BoxField::sample(n, N, side, [&](std::span<const double> x) {
        double s = 0.0;
        for (int a = 0; a < 4 * n; ++a) {
            const double dxa = x[static_cast<std::size_t>(a)] - center[a];
            s += dxa * dxa;
        }
        return s - r2;
    });
}

BoxField poisson_well(int n, int N, double side,
                      const std::function<double(std::span<const double>)>& g,
                      double cg_tol) {
    BoxField rhs = BoxField::sample(n, N, side, g);
    BoxField u(n, N, side);
    const std::vector<std::size_t> interior = interior_points(u);
    const int d = u.dim();
    const double inv_h2 = 1.0 / (u.h() * u.h());

    // Neighbor table for the interior Laplacian.
    std::vector<std::size_t> nb(interior.size() * static_cast<std::size_t>(2 * d));
    MultiIndex c{};
    for (std::size_t ii = 0; ii < interior.size(); ++ii) {
        u.coords(interior[ii], c);
        for (int a = 0; a < d; ++a) {
            c[a] += 1;
            nb[ii * 2 * d + 2 * a] = u.index(c);
            c[a] -= 2;
            nb[ii * 2 * d + 2 * a + 1] = u.index(c);
            c[a] += 1;
        }
    }

    // CG on -laplacian u = -g over interior unknowns (boundary pinned to 0).
    auto apply = [&](const std::vector<double>& x_full, std::vector<double>& y) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(interior.size()); ++ii) {
            const auto k = static_cast<std::size_t>(ii);
            double s = 2.0 * d * x_full[interior[k]];
            for (int a = 0; a < 2 * d; ++a) s -= x_full[nb[k * 2 * d + a]];
            y[k] = s * inv_h2;
        }
    };

    std::vector<double> x_full(u.size(), 0.0);
    std::vector<double> r(interior.size()), p_full(u.size(), 0.0), ap(interior.size());
    for (std::size_t ii = 0; ii < interior.size(); ++ii) r[ii] = -rhs[interior[ii]];
    std::vector<double> p(interior.size());
    p = r;
    for (std::size_t ii = 0; ii < interior.size(); ++ii) p_full[interior[ii]] = p[ii];
    double rr = par::dot(r, r);
    const double rr0 = rr;
    const int max_cg = 20000;
    for (int it = 0; it < max_cg && rr > cg_tol * cg_tol * rr0 && rr > 1e-300; ++it) {
        apply(p_full, ap);
        const double pap = par::dot(p, ap);
        if (pap <= 0.0) break;
        const double alpha = rr / pap;
        for (std::size_t ii = 0; ii < interior.size(); ++ii) {
            x_full[interior[ii]] += alpha * p[ii];
            r[ii] -= alpha * ap[ii];
        }
        const double rr_new = par::dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t ii = 0; ii < interior.size(); ++ii) {
            p[ii] = r[ii] + beta * p[ii];
            p_full[interior[ii]] = p[ii];
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = x_full[i];
    return u;
}

}  // namespace qma::abp
