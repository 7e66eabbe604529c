#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gur/serialize.hpp"

namespace gur {

/// Settings for the built-in verification battery.
struct BatteryOptions {
    double hbar = 1.0;
    std::optional<double> tol_override; // replaces both per-engine defaults
    std::uint64_t seed = 1;             // base seed of the random sweep
    int random_count = 1000;
    bool run_gaussian = true;
    bool run_grid = true;
};

struct BatteryOutcome {
    std::vector<OutputRow> rows; // sorted by (name, state_descriptor)
    bool all_pass = true;
    std::string first_failure;   // "name @ state" of the first failing row
};

/// Runs every applicable relation and engine self-check over the built-in
/// state battery: product vacua n=1..3, the squeezed-pair and correlated-
/// triple families on their r grids, seeded random Gaussian states for
/// n=2 and n=3, and the grid-engine cross-checks. Output order is fixed by
/// the (name, state_descriptor) sort key, independent of evaluation order.
BatteryOutcome run_verify_battery(const BatteryOptions& opt);

} // namespace gur
