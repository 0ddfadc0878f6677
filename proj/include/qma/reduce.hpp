#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qma::par {

/// Deterministic reductions: the array is cut into fixed 4096-element
/// blocks, block partials are computed independently (parallel), and the
/// partials are combined by a fixed-order pairwise tree. Results are
/// bit-identical for any thread count.
inline constexpr std::size_t kReduceBlock = 4096;

double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double sup_abs(std::span<const double> v);
double max_val(std::span<const double> v);
double min_val(std::span<const double> v);
/// Index of the first occurrence of the maximum value.
std::size_t argmax(std::span<const double> v);

/// sum(|v_i|^p) without the h^d volume weight.
double pow_sum(std::span<const double> v, double p);

/// Pairwise-tree combination of partials in index order (exposed for tests).
double pairwise_tree(std::vector<double>& partials);

void set_threads(int count);
int max_threads();

}  // namespace qma::par
