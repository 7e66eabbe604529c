#pragma once

#include <stdexcept>
#include <string>

namespace gur {

/// A stated precondition of an operation was violated by the input.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An (anti)symmetrization projector annihilated the state.
class degenerate_projection_error : public std::runtime_error {
public:
    explicit degenerate_projection_error(const std::string& what) : std::runtime_error(what) {}
};

/// A grid state has non-negligible amplitude on the outermost grid layer,
/// so DFT-based momentum moments would alias. Carries a diagnostic naming
/// the offending extent.
class boundary_decay_error : public std::runtime_error {
public:
    explicit boundary_decay_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gur
