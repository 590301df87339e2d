#pragma once

#include "hrsim/config.hpp"

#include <string>
#include <vector>

namespace hrsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast property checks over every module (seconds, not minutes). Uses the
/// seed and thread count of `cfg`; model parameters come from the named
/// presets so results do not depend on command-line overrides.
std::vector<CheckResult> run_property_checks(const RunConfig& cfg);

} // namespace hrsim
