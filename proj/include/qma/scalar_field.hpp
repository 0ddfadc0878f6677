#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qma/errors.hpp"

namespace qma {

/// Axes live in the order t1,x1,y1,z1,t2,...; 12 axes covers n <= 3.
inline constexpr int kMaxAxes = 12;
using MultiIndex = std::array<int, kMaxAxes>;

/// Real-valued function sampled on the uniform periodic lattice of the
/// torus (R/Z)^{4n}: N points per axis, spacing h = 1/N, row-major with the
/// last axis fastest. Immutable during parallel reads.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int n, int N);

    static ScalarField zeros(int n, int N) { return ScalarField(n, N); }

    /// Sample a function of the torus coordinates xi in [0,1)^{4n}.
    static ScalarField sample(int n, int N,
                              const std::function<double(std::span<const double>)>& f);

    int n() const { return n_; }
    int N() const { return N_; }
    int dim() const { return 4 * n_; }
    double h() const { return 1.0 / N_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Flat index of a multi-index reduced mod N per axis.
    std::size_t index(const MultiIndex& c) const;
    void coords(std::size_t idx, MultiIndex& c) const;
    /// Torus coordinate of a lattice point along one axis.
    double coordinate(int c) const { return static_cast<double>(c) / N_; }

    /// Lattice mean (deterministic reduction).
    double mean() const;
    double sup_abs() const;
    /// L1 norm: sum |u| * h^{4n}.
    double l1_norm() const;
    /// Exact lattice max and its first flat index.
    std::pair<double, std::size_t> max_with_location() const;

    ScalarField& operator+=(double c);
    ScalarField& operator-=(double c);

private:
    int n_ = 0, N_ = 0;
    std::vector<double> values_;
};

/// File format: one JSON header line, then raw little-endian float64.
void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);

}  // namespace qma
