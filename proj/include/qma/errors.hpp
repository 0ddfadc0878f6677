#pragma once

#include <stdexcept>
#include <string>

namespace qma {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHyperHermitian : Error {
    explicit NotHyperHermitian(const std::string& what = "matrix violates a_ji = conj(a_ij)")
        : Error(what) {}
};

// Consecutive paired eigenvalues of the complex embedding disagree beyond
// tolerance; signals numerical breakdown, never silently accepted.
struct PairingAmbiguous : Error {
    explicit PairingAmbiguous(const std::string& what) : Error(what) {}
};

struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& what = "quadratic form matrix is not symmetric")
        : Error(what) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& what = "grid resolution below stencil minimum (N >= 4)")
        : Error(what) {}
};

struct JetNotPluriharmonic : Error {
    explicit JetNotPluriharmonic(const std::string& what) : Error(what) {}
};

struct CalibrationInconsistent : Error {
    explicit CalibrationInconsistent(const std::string& what) : Error(what) {}
};

struct NotPsh : Error {
    double worst_margin;
    std::size_t worst_point;
    NotPsh(const std::string& what, double margin, std::size_t point)
        : Error(what), worst_margin(margin), worst_point(point) {}
};

struct PreconditionViolated : Error {
    explicit PreconditionViolated(const std::string& what) : Error(what) {}
};

struct SublevelTouchesBoundary : Error {
    explicit SublevelTouchesBoundary(const std::string& what) : Error(what) {}
};

struct MaxIterationsExceeded : Error {
    explicit MaxIterationsExceeded(const std::string& what) : Error(what) {}
};

struct LinearSolveStalled : Error {
    explicit LinearSolveStalled(const std::string& what) : Error(what) {}
};

struct UnknownSuite : Error {
    explicit UnknownSuite(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace qma
