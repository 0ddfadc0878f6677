#include "qma/reduce.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qma::par {

namespace {

template <typename BlockOp>
std::vector<double> block_partials(std::size_t size, BlockOp&& op) {
    const std::size_t blocks = (size + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(lo + kReduceBlock, size);
        partials[static_cast<std::size_t>(b)] = op(lo, hi);
    }
    return partials;
}

}  // namespace

double pairwise_tree(std::vector<double>& p) {
    if (p.empty()) return 0.0;
    std::size_t count = p.size();
    while (count > 1) {
        const std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i) p[i] = p[2 * i] + p[2 * i + 1];
        if (count % 2 == 1) {
            p[half] = p[count - 1];
            count = half + 1;
        } else {
            count = half;
        }
    }
    return p[0];
}

double sum(std::span<const double> v) {
    auto partials = block_partials(v.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    });
    return pairwise_tree(partials);
}

double dot(std::span<const double> a, std::span<const double> b) {
    auto partials = block_partials(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        return s;
    });
    return pairwise_tree(partials);
}

double pow_sum(std::span<const double> v, double p) {
    auto partials = block_partials(v.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::abs(v[i]), p);
        return s;
    });
    return pairwise_tree(partials);
}

double sup_abs(std::span<const double> v) {
    auto partials = block_partials(v.size(), [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(v[i]));
        return m;
    });
    double m = 0.0;
    for (double p : partials) m = std::max(m, p);
    return m;
}

double max_val(std::span<const double> v) {
    auto partials = block_partials(v.size(), [&](std::size_t lo, std::size_t hi) {
        double m = v[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) m = std::max(m, v[i]);
        return m;
    });
    double m = partials[0];
    for (double p : partials) m = std::max(m, p);
    return m;
}

double min_val(std::span<const double> v) {
    auto partials = block_partials(v.size(), [&](std::size_t lo, std::size_t hi) {
        double m = v[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) m = std::min(m, v[i]);
        return m;
    });
    double m = partials[0];
    for (double p : partials) m = std::min(m, p);
    return m;
}

std::size_t argmax(std::span<const double> v) {
    const double m = max_val(v);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == m) return i;
    return 0;
}

void set_threads(int count) {
#ifdef _OPENMP
    if (count > 0) omp_set_num_threads(count);
#else
    (void)count;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace qma::par
