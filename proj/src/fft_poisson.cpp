#include "qma/fft_poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace qma::fd {

QuarterLaplacianInverse::QuarterLaplacianInverse(int n, int N) : dim_(4 * n), N_(N) {
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(N_);
    work_.resize(size_);

    // symbol(k) = -(1/4) sum_a (4/h^2) sin^2(pi k_a / N), h = 1/N.
    std::vector<double> axis(N_);
    const double scale = static_cast<double>(N_) * N_;  // 1/h^2
    for (int k = 0; k < N_; ++k) {
        const double s = std::sin(std::numbers::pi * k / N_);
        axis[static_cast<std::size_t>(k)] = -scale * s * s;  // -(4/h^2) sin^2 / 4
    }
    symbol_.assign(size_, 0.0);
    for (std::size_t idx = 0; idx < size_; ++idx) {
        std::size_t rest = idx;
        double sym = 0.0;
        for (int a = 0; a < dim_; ++a) {
            sym += axis[rest % static_cast<std::size_t>(N_)];
            rest /= static_cast<std::size_t>(N_);
        }
        symbol_[idx] = sym;
    }

    std::vector<int> dims(static_cast<std::size_t>(dim_), N_);
    auto* buf = reinterpret_cast<fftw_complex*>(work_.data());
    plan_fwd_ = fftw_plan_dft(dim_, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft(dim_, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

QuarterLaplacianInverse::~QuarterLaplacianInverse() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void QuarterLaplacianInverse::apply_inverse(std::span<const double> in,
                                            std::span<double> out) {
    for (std::size_t i = 0; i < size_; ++i) work_[i] = {in[i], 0.0};
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    work_[0] = {0.0, 0.0};  // zero mode: mean-zero gauge
    for (std::size_t i = 1; i < size_; ++i) work_[i] /= symbol_[i];
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double norm = 1.0 / static_cast<double>(size_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(size_); ++i)
        out[static_cast<std::size_t>(i)] = work_[static_cast<std::size_t>(i)].real() * norm;
}

}  // namespace qma::fd
