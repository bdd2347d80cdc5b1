#pragma once

// Property suites behind the `verify` subcommand. Each suite runs a fixed
// set of checks and reports machine-readable verdicts; the acceptance tests
// call the same entry points with their own sample counts.

#include <cstdint>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"
#include "ordfb/rademacher.hpp"

namespace ordfb::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    bool pass = true;
    std::vector<CheckResult> checks;

    void add(CheckResult c) {
        pass = pass && c.pass;
        checks.push_back(std::move(c));
    }
};

// random measure on a scale: normalized exponential draws
DiscreteMeasure random_measure(const OrdinalScale& scale, Rng& rng);
// random point of the k-simplex
std::vector<double> random_simplex_point(std::size_t k, Rng& rng);

SuiteResult affinity_suite(RngSeed seed, std::size_t n_measures = 100);
SuiteResult unbiasedness_suite(RngSeed seed, std::size_t n_oracles = 1000,
                               std::size_t n_decompositions = 500,
                               std::size_t n_stream = 1000000);
SuiteResult coupling_suite(RngSeed seed, std::size_t n_measures = 1000,
                           std::size_t n_simplex = 1000);
SuiteResult rademacher_suite(RngSeed seed, std::size_t n_replicas = 2000);

std::vector<SuiteResult> run_suites(const std::string& which, RngSeed seed);

std::string suites_to_json(const std::vector<SuiteResult>& suites);

}  // namespace ordfb::verify
