#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kpzlab/verify.hpp"

namespace kpzlab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool statistics_pass = false;
    double runtime_seconds = 0.0;
    double runtime_limit_seconds = 0.0;
    /// Individual measurements that make up the criterion.
    std::vector<CheckReport> checks;
    std::vector<std::string> notes;

    bool pass() const { return statistics_pass && runtime_seconds < runtime_limit_seconds; }
    /// One line: "PASS|FAIL <id> <title>: <key numbers> [runtime]".
    std::string summary_line() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240607;
    std::size_t threads = 1;
};

/**
 * The acceptance suite. Criteria 4, 5 and 11 read one narrow-wedge ensemble
 * that is simulated on first use and kept for the others; its cost is
 * charged to whichever of them runs first.
 */
class AcceptanceSuite {
public:
    explicit AcceptanceSuite(AcceptanceOptions options = {});
    ~AcceptanceSuite();

    static constexpr int kCriteria = 11;

    CriterionResult run(int id);
    std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_done = {});

    static std::string title(int id);

private:
    struct Cache;
    AcceptanceOptions options_;
    std::unique_ptr<Cache> cache_;
};

}  // namespace kpzlab
