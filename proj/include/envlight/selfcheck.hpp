// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace envlight {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Runs the library's invariant suite on seeded synthetic data. Results
/// depend only on `seed`.
std::vector<CheckResult> run_selfcheck(std::uint64_t seed);

nlohmann::json selfcheck_manifest(const std::vector<CheckResult>& results, std::uint64_t seed);

}  // namespace envlight
