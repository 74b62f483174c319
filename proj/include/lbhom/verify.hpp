#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lbhom {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    bool quick = false;      // smaller Monte Carlo proxies for 10/11
    int threads = 0;         // 0 = hardware concurrency
    std::uint64_t seed = 20260809;
    std::vector<int> only;   // empty = all criteria
};

// Runs the acceptance criteria; one result per criterion, in order.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts);

}  // namespace lbhom
