#pragma once

#include <string>
#include <vector>

#include "gur/constants.hpp"
#include "gur/grid.hpp"

namespace gur {

/// Linear grid observable: a real combination of position multiplications
/// and spectral momentum applications, sum of coeff * Q_i / coeff * P_i
/// terms. Covers the operators the Robertson relation is evaluated on.
struct GridOperator {
    struct Term {
        double coeff;
        bool is_momentum;
        int particle; // 1-based
    };
    std::vector<Term> terms;

    static GridOperator position(int particle, double coeff = 1.0);
    static GridOperator momentum(int particle, double coeff = 1.0);
    static GridOperator collective_position(int n);
    static GridOperator collective_momentum(int n);

    GridOperator operator+(const GridOperator& other) const;
    std::string describe() const;
};

/// Applies the operator to the state's amplitudes (result is not
/// normalized; it is O|s>, not a state). Throws boundary_decay_error when
/// the result leaves the boundary-decay envelope, since any further
/// spectral application would alias.
std::vector<cplx> apply(const GridOperator& op, const GridState& s, const Constants& c = {});

} // namespace gur
