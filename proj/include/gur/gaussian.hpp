#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "gur/constants.hpp"
#include "gur/moments.hpp"

namespace gur {

/// N-mode Gaussian state (one mode per particle, 1D) in the block
/// ordering R = (q_1..q_N, p_1..p_N). sigma is the symmetrized covariance
/// sigma_ab = <{R_a,R_b}>/2 - <R_a><R_b>. The ordering is fixed
/// everywhere in this library so that cov_q / cov_p extraction is a
/// contiguous block copy.
struct GaussianState {
    int n = 0;
    double hbar = 1.0;
    Eigen::VectorXd mean;  // length 2n
    Eigen::MatrixXd sigma; // 2n x 2n

    /// Validates and constructs. Every constructor path funnels through
    /// here, so no invalid state escapes.
    GaussianState(int n_, double hbar_, Eigen::VectorXd mean_, Eigen::MatrixXd sigma_);
};

/// Standard symplectic form for the (q_1..q_N, p_1..p_N) ordering:
/// Omega = [[0, I], [-I, 0]], so that [R_a, R_b] = i hbar Omega_ab.
Eigen::MatrixXd symplectic_form(int n);

/// Checks sigma = sigma^T within 1e-12 and sigma + (i hbar / 2) Omega >= 0
/// with eigenvalue floor -1e-10. Throws std::invalid_argument on failure.
void check_symplectic_validity(const Eigen::MatrixXd& sigma, int n, double hbar);

/// |psi_1> x ... x |psi_N> of vacua: mean 0, sigma = (hbar/2) I.
GaussianState make_product_vacuum(int n, const Constants& c = {});

/// Two-mode squeezed vacuum with squeezing r:
///   <q_i^2> = (hbar/2) cosh 2r,  <q_1 q_2> = (hbar/2) sinh 2r,
///   <p_i^2> = (hbar/2) cosh 2r,  <p_1 p_2> = -(hbar/2) sinh 2r.
GaussianState make_two_mode_squeezed(double r, const Constants& c = {});

/// Permutation-symmetric entangled triple: the collective mode
/// (q_1+q_2+q_3)/sqrt(3) is squeezed by e^{-2r} in position, the two
/// orthogonal modes stay in vacuum, expressed back in particle
/// coordinates. All single-particle dispersions are equal by construction
/// and C_Q(i,j) is the same for every pair.
GaussianState make_correlated_triple(double r, const Constants& c = {});

/// Random pure Gaussian state: a squeezing vector with |r_k| <= squeeze_max
/// drawn uniformly, conjugated by a Haar-random orthogonal-symplectic
/// matrix (QR of a complex Ginibre sample on the unitary representation).
/// Deterministic for fixed seed; the generator is mt19937_64 with
/// hand-rolled uniform/normal mappings, so the sequence is identical on
/// every platform.
GaussianState make_random_state(int n, std::uint64_t seed, double squeeze_max,
                                const Constants& c = {});

/// Same state with the mean vector displaced by d (length 2n). Covariances
/// are displacement-invariant.
GaussianState displaced(const GaussianState& s, const Eigen::VectorXd& d);

/// Exact first/second particle moments. No sampling, no discretization.
MomentTable moments(const GaussianState& s);

/// JSON round-trip: {"n":..,"hbar":..,"mean":[..],"sigma":[[..]]}.
/// Numbers are emitted as shortest round-trip decimal strings, so the
/// round trip is lossless at full double precision.
std::string to_json(const GaussianState& s);
GaussianState gaussian_from_json(const std::string& text);

} // namespace gur
