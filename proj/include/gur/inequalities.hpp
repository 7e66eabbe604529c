#pragma once

#include <array>
#include <vector>

#include "gur/constants.hpp"
#include "gur/grid.hpp"
#include "gur/moments.hpp"
#include "gur/operators.hpp"
#include "gur/report.hpp"

namespace gur {

/// Evaluation settings for the relation suite. Gaussian-engine results
/// default to tol = 1e-9 absolute slack; grid-engine results to 1e-6
/// (discretization and DFT leakage dominate the grid-side error).
struct SuiteConfig {
    double hbar = 1.0;
    double tol = 1e-9;

    SuiteConfig() = default;
    SuiteConfig(double hbar_, double tol_);

    static SuiteConfig gaussian_defaults(double hbar = 1.0) { return {hbar, 1e-9}; }
    static SuiteConfig grid_defaults(double hbar = 1.0) { return {hbar, 1e-6}; }
};

/// (Delta A)^2 (Delta B)^2 >= |<[A,B]>|^2 / 4 for linear grid observables,
/// evaluated by applying the operators to the wavefunction.
InequalityReport robertson(const GridState& s, const GridOperator& a, const GridOperator& b,
                           const SuiteConfig& cfg);

/// Collective relation (Delta Q)^2 (Delta P)^2 >= N^2 hbar^2 / 4, with the
/// collective dispersions taken as the full double sums of the covariance
/// matrices.
InequalityReport collective_gur(const MomentTable& m, const SuiteConfig& cfg);

/// Same relation assembled from the split diagonal / off-diagonal sums
/// (algebraically identical to collective_gur; kept as an independent
/// consistency check). Sub-values carry the four partial sums.
InequalityReport gur_split(const MomentTable& m, const SuiteConfig& cfg);

/// Two-particle form with half-weighted variances plus the covariance:
/// [var_q1/2 + var_q2/2 + C_Q(1,2)] * [same for P] >= hbar^2/4.
/// The bracketed factors are recorded as sub-values and the product is
/// evaluated directly, with no positivity assumption on the factors.
InequalityReport gur_pair(const MomentTable& m, const SuiteConfig& cfg);

enum class Quadrature { Q, P };

/// Covariance bound |C(1,2)| <= var_1/2 + var_2/2 for position or
/// momentum. Reported with lhs = var_1/2 + var_2/2 - |C(1,2)| and rhs = 0,
/// so the slack is the distance to saturation.
InequalityReport schwarz_pair_bound(const MomentTable& m, Quadrature which,
                                    const SuiteConfig& cfg);

/// [var_q1 + var_q2] * [var_p1 + var_p2] >= hbar^2 / 4.
InequalityReport gur_two_bound(const MomentTable& m, const SuiteConfig& cfg);

/// Delta Q_i Delta P_i >= hbar/4 (n=2) or hbar/8 (n=3) under the
/// equal-dispersion preparation. Requires all single-particle Q
/// dispersions equal within 1e-6 relative, same for P; throws
/// precondition_error naming the asymmetric pair otherwise. The
/// conventional hbar/2 single-particle reference rides along as a
/// sub-value.
InequalityReport symmetric_product_bound(const MomentTable& m, const SuiteConfig& cfg);

/// Three-particle covariance bounds: sum var >= -sum_{i!=j} a_i a_j C(i,j)
/// for all eight sign vectors (the four inequivalent ones plus their
/// global flips as a redundancy check), then the combined two-sided bound
/// -sum var <= sum_{i!=j} C(i,j) <= 3 sum var. One report per relation;
/// the combined report's slack is the smaller of the two margins.
std::vector<InequalityReport> schwarz_triple_bounds(const MomentTable& m, Quadrature which,
                                                    const SuiteConfig& cfg);

/// (sum var_q) * (sum var_p) >= 9 hbar^2 / 64.
InequalityReport gur_three_bound(const MomentTable& m, const SuiteConfig& cfg);

/// Every relation that applies to an n-particle moment table, in a fixed
/// deterministic order. Relations whose preparation precondition fails
/// (the symmetric product bound on asymmetric states) are skipped.
std::vector<InequalityReport> evaluate_applicable(const MomentTable& m, const SuiteConfig& cfg);

} // namespace gur
