#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qma/abp.hpp"
#include "qma/calabi.hpp"

namespace qma::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content digest, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& p);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& body);

/// Parses JSON and rejects any key not in `allowed` (fail-closed).
json parse_object(const std::string& text, const std::string& what);
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where);

/// Problem specification: n, N, F family, solver settings, seed.
struct ProblemSpec {
    calabi::TorusProblem problem;
    calabi::SolverConfig solver;
    std::uint64_t seed = 0;
    std::string family;
    double scale = 1.0;
};
ProblemSpec parse_problem(const json& cfg);
ProblemSpec load_problem(const std::filesystem::path& config_path);

/// Sweep specification: a problem template plus the list of scales.
struct SweepSpec {
    ProblemSpec base;
    std::vector<double> scales;
    bool had_duplicates = false;
};
SweepSpec load_sweep(const std::filesystem::path& config_path);

/// Benchmark specification.
struct BenchSpec {
    int n = 1;
    int N = 16;
    int repetitions = 5;
    std::uint64_t seed = 0;
};
BenchSpec load_bench(const std::filesystem::path& config_path);

json to_json(const calabi::SolveReport& rep);
json to_json(const calabi::SweepResult& res);
json to_json(const abp::AbpReport& rep);

std::string sweep_csv(const calabi::SweepResult& res);
std::string abp_csv_header();
std::string abp_csv_row(const std::string& instance, const abp::AbpReport& rep);

/// Run manifest: tool version, config digest, per-phase wall-clock
/// timings, environment note, and a digest per output file. Timing fields
/// are segregated under "timings" so report diffs stay clean.
class Manifest {
public:
    Manifest(std::string subcommand, std::string config_digest);
    void add_timing(const std::string& phase, double seconds);
    void add_output(const std::filesystem::path& p);
    void set(const std::string& key, const json& value);
    json to_json() const;
    void write(const std::filesystem::path& p) const;

private:
    json body_;
    json timings_;
    json outputs_;
};

}  // namespace qma::io
