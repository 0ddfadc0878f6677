#include "qma/scalar_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qma/reduce.hpp"

namespace qma {

namespace {

std::size_t checked_size(int n, int N) {
    if (n < 1 || n > 3) throw ConfigError("field dimension n must be in {1,2,3}");
    if (N < 1) throw ConfigError("grid resolution must be positive");
    std::size_t s = 1;
    for (int a = 0; a < 4 * n; ++a) {
        if (s > (std::size_t(1) << 40) / static_cast<std::size_t>(N))
            throw ConfigError("grid too large");
        s *= static_cast<std::size_t>(N);
    }
    return s;
}

}  // namespace

ScalarField::ScalarField(int n, int N) : n_(n), N_(N), values_(checked_size(n, N), 0.0) {}

ScalarField ScalarField::sample(int n, int N,
                                const std::function<double(std::span<const double>)>& f) {
    ScalarField out(n, N);
    const int d = out.dim();
    MultiIndex c{};
    std::array<double, kMaxAxes> xi{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coords(i, c);
        for (int a = 0; a < d; ++a) xi[a] = out.coordinate(c[a]);
        out.values_[i] = f(std::span<const double>(xi.data(), static_cast<std::size_t>(d)));
    }
    return out;
}

std::size_t ScalarField::index(const MultiIndex& c) const {
    const int d = dim();
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
        int v = c[a] % N_;
        if (v < 0) v += N_;
        idx = idx * static_cast<std::size_t>(N_) + static_cast<std::size_t>(v);
    }
    return idx;
}

void ScalarField::coords(std::size_t idx, MultiIndex& c) const {
    const int d = dim();
    for (int a = d - 1; a >= 0; --a) {
        c[a] = static_cast<int>(idx % static_cast<std::size_t>(N_));
        idx /= static_cast<std::size_t>(N_);
    }
}

double ScalarField::mean() const { return par::sum(values_) / static_cast<double>(size()); }

double ScalarField::sup_abs() const { return par::sup_abs(values_); }

double ScalarField::l1_norm() const {
    const double cell = std::pow(h(), dim());
    return par::pow_sum(values_, 1.0) * cell;
}

std::pair<double, std::size_t> ScalarField::max_with_location() const {
    const std::size_t i = par::argmax(values_);
    return {values_[i], i};
}

ScalarField& ScalarField::operator+=(double c) {
    for (auto& v : values_) v += c;
    return *this;
}

ScalarField& ScalarField::operator-=(double c) { return *this += -c; }

void save_field(const ScalarField& f, const std::string& path) {
    nlohmann::ordered_json header;
    header["qma_field"] = 1;
    header["n"] = f.n();
    header["N"] = f.N();
    header["ordering"] = "row-major t1,x1,y1,z1,...";
    header["count"] = f.size();
    header["dtype"] = "float64-le";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << header.dump() << "\n";
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
}

ScalarField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("qma_field", 0) != 1)
        throw ConfigError("not a qma field file: " + path);
    if (header.value("dtype", "") != "float64-le")
        throw ConfigError("unsupported field dtype in " + path);
    ScalarField f(header.at("n").get<int>(), header.at("N").get<int>());
    if (header.at("count").get<std::size_t>() != f.size())
        throw ConfigError("field header count mismatch in " + path);
    is.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != f.size() * sizeof(double))
        throw ConfigError("truncated field payload in " + path);
    return f;
}

}  // namespace qma
