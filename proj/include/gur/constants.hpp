#pragma once

#include <stdexcept>

namespace gur {

/// Runtime physical constants. Everything in this library scales
/// homogeneously in hbar, so tests run in natural units (hbar = 1);
/// set hbar_si for SI presentation.
struct Constants {
    double hbar = 1.0;

    Constants() = default;
    explicit Constants(double hbar_) : hbar(hbar_) {
        if (!(hbar > 0.0))
            throw std::invalid_argument("Constants: hbar must be strictly positive");
    }

    static constexpr double hbar_si = 1.054571817e-34;
};

} // namespace gur
