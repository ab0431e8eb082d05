#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crw {

enum class VerifyLevel { fast, full };
VerifyLevel parse_verify_level(const std::string& s);
std::string to_string(VerifyLevel l);

enum class Status { pass, fail, skip };

struct CriterionResult {
    int id = 0;
    std::string title;
    Status status = Status::fail;
    /// Measured values against their tolerances.
    std::string detail;
    double seconds = 0.0;
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::fast;
    std::vector<CriterionResult> results;

    [[nodiscard]] bool pass() const;
};

/// One line: "criterion <id> <PASS|FAIL|SKIP> <title>: <detail> (<seconds> s)".
std::string format_result(const CriterionResult& r);

constexpr int kCriterionCount = 10;

/// Runs criteria 1..10 (or only the listed ids). The full level uses the
/// reference sizes; the fast level shrinks the Monte Carlo runs and skips the
/// L = 2048 pair-correlation run. Each finished line is written to
/// `progress` when given.
VerifyReport verify_suite(VerifyLevel level, std::ostream* progress = nullptr, const std::vector<int>& only = {});

}  // namespace crw
