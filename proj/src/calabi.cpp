#include "qma/calabi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qma/fft_poisson.hpp"
#include "qma/quadratic_form.hpp"
#include "qma/reduce.hpp"

namespace qma::calabi {

namespace {

using Vec = std::vector<double>;

void project_mean_zero(std::span<double> v) {
    const double m = par::sum(v) / static_cast<double>(v.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(v.size()); ++i)
        v[static_cast<std::size_t>(i)] -= m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
        y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

double closed_form_moore_det(const HyperHermitianMatrix& m) {
    if (m.n() == 1) return m.at(0, 0).t;
    if (m.n() == 2) return m.at(0, 0).t * m.at(1, 1).t - m.at(0, 1).norm_sq();
    return moore_det(m);
}

struct Workspace {
    const TorusProblem* problem = nullptr;
    Vec exp_f;
    double mean_exp_f = 1.0;
    fd::QuarterLaplacianInverse* precond = nullptr;

    std::size_t size() const { return exp_f.size(); }
};

struct StateEval {
    fd::MooreState state;
    Vec det;
    double A = 1.0;
    Vec res;
    double res_sup = 0.0;
    double margin = 0.0;
};

void evaluate_state(const Workspace& ws, const ScalarField& phi, StateEval& ev) {
    fd::build_moore_state(phi, ev.state);
    ev.det.resize(ws.size());
    fd::moore_density(ev.state, ev.det);
    ev.margin = fd::min_eigenvalue(ev.state);
    ev.A = par::sum(ev.det) / static_cast<double>(ws.size()) / ws.mean_exp_f;
    ev.res.resize(ws.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ws.size()); ++i)
        ev.res[static_cast<std::size_t>(i)] =
            ev.det[static_cast<std::size_t>(i)] - ev.A * ws.exp_f[static_cast<std::size_t>(i)];
    ev.res_sup = par::sup_abs(ev.res);
}

/// Right-preconditioned BiCGStab for P J x = b on the mean-zero subspace.
/// Returns false on stall/breakdown.
bool bicgstab(const Workspace& ws, const fd::MooreState& state, const ScalarField& phi_like,
              std::span<const double> b, std::span<double> x, double rel_tol, int max_iters,
              int* iters_used) {
    const std::size_t count = b.size();
    auto apply_op = [&](std::span<const double> in, std::span<double> out) {
        // in -> J in, projected back to mean zero
        ScalarField delta(phi_like.n(), phi_like.N());
        std::copy(in.begin(), in.end(), delta.values().begin());
        fd::moore_density_jacobian_apply(state, delta, out);
        project_mean_zero(out);
    };
    auto apply_precond = [&](std::span<const double> in, std::span<double> out) {
        ws.precond->apply_inverse(in, out);
    };

    Vec r(b.begin(), b.end()), rhat(b.begin(), b.end());
    Vec p(count, 0.0), v(count, 0.0), y(count), z(count), t(count), s(count);
    std::fill(x.begin(), x.end(), 0.0);

    const double b_norm = std::sqrt(par::dot(b, b));
    if (b_norm == 0.0) {
        if (iters_used) *iters_used = 0;
        return true;
    }
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < max_iters; ++it) {
        const double rho_new = par::dot(rhat, r);
        if (std::abs(rho_new) < 1e-300) return false;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
                const auto k = static_cast<std::size_t>(i);
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
        }
        rho = rho_new;
        apply_precond(p, y);
        apply_op(y, v);
        const double rv = par::dot(rhat, v);
        if (std::abs(rv) < 1e-300) return false;
        alpha = rho / rv;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            const auto k = static_cast<std::size_t>(i);
            s[k] = r[k] - alpha * v[k];
        }
        if (std::sqrt(par::dot(s, s)) <= rel_tol * b_norm) {
            axpy(alpha, y, x);
            if (iters_used) *iters_used = it + 1;
            return true;
        }
        apply_precond(s, z);
        apply_op(z, t);
        const double tt = par::dot(t, t);
        if (tt < 1e-300) return false;
        omega = par::dot(t, s) / tt;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            const auto k = static_cast<std::size_t>(i);
            x[k] += alpha * y[k] + omega * z[k];
            r[k] = s[k] - omega * t[k];
        }
        if (std::sqrt(par::dot(r, r)) <= rel_tol * b_norm) {
            if (iters_used) *iters_used = it + 1;
            return true;
        }
        if (std::abs(omega) < 1e-300) return false;
    }
    return false;
}

struct StageResult {
    SolveStatus status = SolveStatus::Converged;
    std::string detail;
    int iterations = 0;
};

StageResult newton_stage(const Workspace& ws, const SolverConfig& cfg, ScalarField& phi,
                         StateEval& ev, std::vector<double>& history) {
    StageResult out;
    project_mean_zero(phi.values());
    evaluate_state(ws, phi, ev);
    if (ev.margin < cfg.margin) {
        out.status = SolveStatus::NotPsh;
        std::ostringstream os;
        os << "initial state margin " << ev.margin << " below " << cfg.margin;
        out.detail = os.str();
        return out;
    }
    history.push_back(ev.res_sup);

    Vec step(ws.size());
    Vec rhs(ws.size());
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (ev.res_sup < cfg.tol) {
            out.iterations = iter;
            return out;
        }
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ws.size()); ++i)
            rhs[static_cast<std::size_t>(i)] = -ev.res[static_cast<std::size_t>(i)];
        project_mean_zero(rhs);
        int lin_iters = 0;
        if (!bicgstab(ws, ev.state, phi, rhs, step, cfg.lin_tol, cfg.lin_max_iters,
                      &lin_iters)) {
            out.status = SolveStatus::LinearSolveStalled;
            out.detail = "BiCGStab breakdown or iteration cap";
            out.iterations = iter;
            return out;
        }

        // Backtracking: keep the psh margin and require residual decrease.
        const double res_prev = ev.res_sup;
        ScalarField trial = phi;
        bool accepted = false;
        StateEval trial_ev;
        for (double alpha = 1.0; alpha >= 1.0 / 4096.0; alpha *= 0.5) {
            trial = phi;
            axpy(alpha, step, trial.values());
            project_mean_zero(trial.values());
            evaluate_state(ws, trial, trial_ev);
            if (trial_ev.margin < cfg.margin) continue;
            if (trial_ev.res_sup < res_prev) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.status = SolveStatus::NotPsh;
            out.detail = "line search exhausted without margin-preserving decrease";
            out.iterations = iter;
            return out;
        }
        phi = std::move(trial);
        ev = std::move(trial_ev);
        history.push_back(ev.res_sup);
    }
    if (ev.res_sup < cfg.tol) {
        out.iterations = cfg.max_iters;
        return out;
    }
    out.status = SolveStatus::MaxIterationsExceeded;
    std::ostringstream os;
    os << "residual " << ev.res_sup << " after " << cfg.max_iters << " iterations";
    out.detail = os.str();
    out.iterations = cfg.max_iters;
    return out;
}

Vec exponentiate(const ScalarField& f, double scale) {
    Vec out(f.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(f.size()); ++i)
        out[static_cast<std::size_t>(i)] = std::exp(scale * f[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterationsExceeded: return "max_iterations_exceeded";
        case SolveStatus::NotPsh: return "not_psh";
        case SolveStatus::LinearSolveStalled: return "linear_solve_stalled";
    }
    return "unknown";
}

ScalarField residual(const TorusProblem& problem, const ScalarField& phi, double A) {
    fd::MooreState state;
    fd::build_moore_state(phi, state);
    const double margin = fd::min_eigenvalue(state);
    if (margin <= 0.0) {
        // locate the worst point for the report
        std::vector<double> det(phi.size());
        fd::moore_density(state, det);
        std::size_t worst = 0;
        if (state.n == 1) {
            double lo = state.ma[0];
            for (std::size_t i = 0; i < state.size(); ++i)
                if (state.ma[i] < lo) { lo = state.ma[i]; worst = i; }
        }
        std::ostringstream os;
        os << "Id + Hess_H(phi) not positive definite, margin " << margin;
        throw NotPsh(os.str(), margin, worst);
    }
    ScalarField res(problem.n, problem.N);
    std::vector<double> det(phi.size());
    fd::moore_density(state, det);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(phi.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        res[k] = det[k] - A * std::exp(problem.F[k]);
    }
    return res;
}

SolveReport solve(const TorusProblem& problem, const SolverConfig& cfg,
                  const ScalarField* initial_guess) {
    if (problem.n != 1 && problem.n != 2)
        throw ConfigError("solver supports n in {1,2}");
    if (problem.N < 4) throw GridTooCoarse();

    SolveReport rep;
    ScalarField phi = initial_guess ? *initial_guess : ScalarField(problem.n, problem.N);

    fd::QuarterLaplacianInverse precond(problem.n, problem.N);
    Workspace ws;
    ws.problem = &problem;
    ws.precond = &precond;

    StateEval ev;
    StageResult stage;

    // Direct attempt at full strength, then the continuation ladder
    // s = 1/4, 1/2, 3/4, 1 reusing the previous stage's solution.
    std::vector<double> ladder{1.0};
    for (int attempt = 0; attempt < 2; ++attempt) {
        rep.residual_history.clear();
        rep.iterations = 0;
        ScalarField work = phi;
        bool ladder_failed = false;
        for (double s : ladder) {
            ws.exp_f = exponentiate(problem.F, s);
            ws.mean_exp_f = par::sum(ws.exp_f) / static_cast<double>(ws.exp_f.size());
            stage = newton_stage(ws, cfg, work, ev, rep.residual_history);
            rep.iterations += stage.iterations;
            if (stage.status != SolveStatus::Converged) {
                ladder_failed = true;
                break;
            }
        }
        if (!ladder_failed) {
            phi = std::move(work);
            break;
        }
        const bool margin_failure = stage.status == SolveStatus::NotPsh;
        if (attempt == 0 && margin_failure && ladder.size() == 1) {
            ladder = {0.25, 0.5, 0.75, 1.0};
            rep.continuation_stages = 4;
            continue;
        }
        rep.status = stage.status;
        rep.failure_detail = stage.detail;
        rep.phi = std::move(phi);
        return rep;
    }

    // Final normalization: exact lattice max shifted to zero.
    const auto [mx, loc] = phi.max_with_location();
    phi -= mx;
    rep.max_location = loc;
    rep.phi_sup = phi.sup_abs();
    rep.phi_l1 = phi.l1_norm();
    rep.A = ev.A;
    rep.psh_margin = ev.margin;
    rep.mass_balance_defect =
        std::abs(par::sum(ev.det) / static_cast<double>(ev.det.size()) -
                 ev.A * ws.mean_exp_f);
    rep.phi = std::move(phi);
    rep.status = SolveStatus::Converged;
    return rep;
}

void ensure_converged(const SolveReport& rep) {
    switch (rep.status) {
        case SolveStatus::Converged: return;
        case SolveStatus::MaxIterationsExceeded:
            throw MaxIterationsExceeded(rep.failure_detail);
        case SolveStatus::NotPsh: throw NotPsh(rep.failure_detail, 0.0, 0);
        case SolveStatus::LinearSolveStalled: throw LinearSolveStalled(rep.failure_detail);
    }
}

ScalarField random_smooth_field(int n, int N, std::uint64_t seed, double amplitude) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> kdist(-1, 1);
    std::uniform_real_distribution<double> adist(0.5, 1.0);
    std::uniform_real_distribution<double> pdist(0.0, 2.0 * std::numbers::pi);
    TrigPoly p;
    p.n = n;
    const int mode_count = 3;
    const double twopi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    for (int m = 0; m < mode_count; ++m) {
        TrigMode mode;
        int k2 = 0;
        for (int a = 0; a < 4 * n; ++a) {
            mode.k[a] = kdist(gen);
            k2 += mode.k[a] * mode.k[a];
        }
        if (k2 == 0) {
            mode.k[0] = 1;
            k2 = 1;
        }
        // per-mode curvature |Hess| <= amp (2 pi)^2 |k|^2 / 4; normalize so
        // the whole start keeps Id + Hess_H safely positive definite
        mode.amp = amplitude * adist(gen) / (0.25 * twopi2 * k2 * mode_count);
        mode.phase = pdist(gen);
        p.modes.push_back(mode);
    }
    return sample_trig(p, N);
}

double uniqueness_check(const TorusProblem& problem, const SolverConfig& cfg,
                        const std::vector<std::uint64_t>& seeds) {
    if (seeds.size() < 2) throw ConfigError("uniqueness check needs >= 2 starts");
    std::vector<ScalarField> solutions;
    for (std::uint64_t seed : seeds) {
        const ScalarField start = random_smooth_field(problem.n, problem.N, seed);
        SolveReport rep = solve(problem, cfg, &start);
        ensure_converged(rep);
        // mean alignment
        ScalarField phi = std::move(rep.phi);
        phi -= phi.mean();
        solutions.push_back(std::move(phi));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < solutions.size(); ++i)
        for (std::size_t j = i + 1; j < solutions.size(); ++j) {
            double dev = 0.0;
            for (std::size_t k = 0; k < solutions[i].size(); ++k)
                dev = std::max(dev, std::abs(solutions[i][k] - solutions[j][k]));
            worst = std::max(worst, dev);
        }
    return worst;
}

namespace {

EnvelopeFit fit_envelope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    EnvelopeFit fit;
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-14) {
        fit.c2 = 0.0;
        fit.c1_least_squares = sy / m;
    } else {
        fit.c2 = (m * sxy - sx * sy) / denom;
        fit.c1_least_squares = (sy - fit.c2 * sx) / m;
        if (fit.c2 < 0.0) {  // envelope must be nondecreasing in ||F||_inf
            fit.c2 = 0.0;
            fit.c1_least_squares = sy / m;
        }
    }
    double rss = 0.0, shift = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.c1_least_squares + fit.c2 * x[i]);
        rss += r * r;
        shift = std::max(shift, r);
    }
    fit.rms_residual = std::sqrt(rss / m);
    fit.c1 = fit.c1_least_squares + shift;  // upper envelope
    fit.slack.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.slack[i] = fit.c1 + fit.c2 * x[i] - y[i];
    return fit;
}

}  // namespace

SweepResult c0_sweep(const ScalarField& base_F, std::vector<double> scales,
                     const SolverConfig& cfg) {
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

    SweepResult out;
    const double base_sup = base_F.sup_abs();
    for (double s : scales) {
        TorusProblem p;
        p.n = base_F.n();
        p.N = base_F.N();
        p.F = base_F;
        for (std::size_t i = 0; i < p.F.size(); ++i) p.F[i] *= s;
        SolveReport rep = solve(p, cfg);
        ensure_converged(rep);
        SweepRecord rec;
        rec.s = s;
        rec.normF_inf = std::abs(s) * base_sup;
        rec.normphi_inf = rep.phi_sup;
        rec.normphi_L1 = rep.phi_l1;
        rec.A = rep.A;
        rec.iters = rep.iterations;
        rec.residual = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
        out.records.push_back(rec);
    }

    std::vector<double> x, y_sup, y_l1;
    for (const auto& r : out.records) {
        x.push_back(std::exp(4.0 * r.normF_inf));
        y_sup.push_back(r.normphi_inf);
        y_l1.push_back(r.normphi_L1);
    }
    out.sup_fit = fit_envelope(x, y_sup);
    out.l1_fit = fit_envelope(x, y_l1);
    return out;
}

double TrigPoly::value(std::span<const double> xi) const {
    double v = 0.0;
    for (const auto& m : modes) {
        double arg = m.phase;
        for (int a = 0; a < 4 * n; ++a)
            arg += 2.0 * std::numbers::pi * m.k[a] * xi[static_cast<std::size_t>(a)];
        v += m.amp * std::cos(arg);
    }
    return v;
}

Eigen::MatrixXd TrigPoly::hessian(std::span<const double> xi) const {
    const int d = 4 * n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    const double twopi = 2.0 * std::numbers::pi;
    for (const auto& m : modes) {
        double arg = m.phase;
        for (int a = 0; a < d; ++a) arg += twopi * m.k[a] * xi[static_cast<std::size_t>(a)];
        const double c = -m.amp * twopi * twopi * std::cos(arg);
        for (int a = 0; a < d; ++a) {
            if (m.k[a] == 0) continue;
            for (int b = 0; b < d; ++b) h(a, b) += c * m.k[a] * m.k[b];
        }
    }
    return h;
}

ScalarField sample_trig(const TrigPoly& p, int N) {
    return ScalarField::sample(p.n, N, [&](std::span<const double> xi) { return p.value(xi); });
}

TorusProblem manufactured_problem(const TrigPoly& phi_star, int N) {
    TorusProblem out;
    out.n = phi_star.n;
    out.N = N;
    out.F = ScalarField::sample(phi_star.n, N, [&](std::span<const double> xi) {
        const Eigen::MatrixXd s = phi_star.hessian(xi);
        const HyperHermitianMatrix h =
            hess_quaternionic(RealQuadraticForm(phi_star.n, s, 1e-9));
        const HyperHermitianMatrix m = HyperHermitianMatrix::identity(phi_star.n) + h;
        const double det = closed_form_moore_det(m);
        if (det <= 0.0)
            throw PreconditionViolated("manufactured phi* loses positivity; reduce amplitude");
        return std::log(det);
    });
    return out;
}

ScalarField fourier_oracle_n1(const TorusProblem& problem) {
    if (problem.n != 1) throw ConfigError("fourier oracle is the n = 1 linear solve");
    Vec ef = exponentiate(problem.F, 1.0);
    const double mean_ef = par::sum(ef) / static_cast<double>(ef.size());
    const double A = 1.0 / mean_ef;
    Vec rhs(ef.size());
    for (std::size_t i = 0; i < ef.size(); ++i) rhs[i] = A * ef[i] - 1.0;
    fd::QuarterLaplacianInverse inv(problem.n, problem.N);
    ScalarField phi(problem.n, problem.N);
    inv.apply_inverse(rhs, phi.values());
    const auto [mx, loc] = phi.max_with_location();
    (void)loc;
    phi -= mx;
    return phi;
}

}  // namespace qma::calabi
