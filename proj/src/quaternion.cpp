#include "qma/quaternion.hpp"

#include <random>

namespace qma {

std::vector<Quaternion> haar_sample_su2(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Quaternion> out;
    out.reserve(count);
    while (out.size() < count) {
        Quaternion q{gauss(gen), gauss(gen), gauss(gen), gauss(gen)};
        const double r = q.norm();
        if (r < 1e-8) continue;  // degenerate draw, resample
        out.push_back(q * (1.0 / r));
    }
    return out;
}

}  // namespace qma
