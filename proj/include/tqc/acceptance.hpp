// acceptance.hpp: the numbered acceptance checks, shared by the acceptance
// binary and `tqc verify`.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tqc::acceptance {

struct CriterionResult {
    int id{0};
    std::string title;
    bool passed{false};
    std::string detail;
};

inline constexpr int kCriterionCount = 10;

// Throws std::out_of_range for ids outside 1..10.
CriterionResult run_criterion(int id);

// "psd", "oracle", "figures" or "all"; throws ConfigError otherwise.
std::vector<int> suite(std::string_view name);

// One line per result, e.g. "[PASS] 5 tdd >= qd on fig4 sweeps: ...".
std::string format(const CriterionResult& r);

}  // namespace tqc::acceptance
