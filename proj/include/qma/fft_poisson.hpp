#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qma::fd {

/// Inverse of the constant-coefficient operator (1/4) Laplacian_h on the
/// mean-zero subspace of the periodic lattice, applied by forward DFT,
/// symbol division and inverse DFT. The zero mode is annihilated, so input
/// and output both live in the mean-zero gauge. Plans use FFTW_ESTIMATE so
/// results are reproducible run to run.
class QuarterLaplacianInverse {
public:
    QuarterLaplacianInverse(int n, int N);
    ~QuarterLaplacianInverse();
    QuarterLaplacianInverse(const QuarterLaplacianInverse&) = delete;
    QuarterLaplacianInverse& operator=(const QuarterLaplacianInverse&) = delete;

    std::size_t size() const { return size_; }
    /// out = ((1/4) Laplacian_h)^{-1} in, zero mode dropped.
    void apply_inverse(std::span<const double> in, std::span<double> out);

private:
    int dim_, N_;
    std::size_t size_;
    std::vector<double> symbol_;  // (1/4) * discrete Laplacian eigenvalues (negative)
    std::vector<std::complex<double>> work_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

}  // namespace qma::fd
