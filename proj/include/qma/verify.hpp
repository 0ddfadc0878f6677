#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qma::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
    std::map<std::string, double> metrics;
};

struct SuiteReport {
    std::string suite;
    bool pass = true;
    std::vector<Check> checks;
    void add(Check c) {
        pass = pass && c.pass;
        checks.push_back(std::move(c));
    }
};

/// Suites: moore, calculus, abp, solver. "all" runs every suite.
std::vector<std::string> suite_names();

SuiteReport run_moore_suite(std::uint64_t seed);
SuiteReport run_calculus_suite(std::uint64_t seed);
SuiteReport run_abp_suite(std::uint64_t seed);
SuiteReport run_solver_suite(std::uint64_t seed);

/// Throws UnknownSuite for anything not in suite_names().
std::vector<SuiteReport> run_suites(const std::string& name, std::uint64_t seed);

nlohmann::ordered_json to_json(const SuiteReport& rep);

}  // namespace qma::verify
