#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gur/constants.hpp"
#include "gur/moments.hpp"

namespace gur {

using cplx = std::complex<double>;

enum class Symmetry : std::uint8_t { none = 0, bosonic = 1, fermionic = 2 };

const char* to_string(Symmetry s);

/// Uniform 1D grid shared by all particles. Sample points sit at cell
/// midpoints, x_k = x_min + (k + 1/2) dx, so a symmetric extent is sampled
/// symmetrically about the origin.
struct GridSpec {
    int n_particles = 1;        // 1..3
    int points_per_axis = 64;   // power of two, >= 16
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t memory_cap = std::size_t{1} << 24; // max total amplitudes

    GridSpec() = default;
    GridSpec(int n, int points, double lo, double hi,
             std::size_t cap = std::size_t{1} << 24);

    double dx() const { return (x_max - x_min) / points_per_axis; }
    double coord(int k) const { return x_min + (k + 0.5) * dx(); }
    std::size_t total_points() const;
};

/// Discretized N-particle 1D wavefunction. amps is row-major with axis k
/// holding particle k+1 (axis 0 slowest). States are immutable value
/// objects; all operations return new states or plain values.
struct GridState {
    GridSpec spec;
    std::vector<cplx> amps;
    Symmetry symmetry = Symmetry::none;
};

/// L2 norm, inner product and normalization under the midpoint quadrature
/// weight dx^n.
double grid_norm(std::span<const cplx> amps, const GridSpec& spec);
cplx grid_inner(std::span<const cplx> bra, std::span<const cplx> ket, const GridSpec& spec);

/// Checks max |amp| on the outermost grid layer against 1e-6 of the global
/// peak. Returns an empty string when fine, otherwise a diagnostic naming
/// the offending extent.
std::string boundary_decay_diagnostic(std::span<const cplx> amps, const GridSpec& spec);

/// Checks normalization (1e-10), boundary decay, and consistency of the
/// symmetry tag (1e-10 in L2). Throws on violation.
void validate(const GridState& s);

/// Samples psi on the grid and normalizes. psi receives the n coordinates
/// of one grid point. The result carries symmetry = none. Throws
/// std::invalid_argument on an all-zero sample and boundary_decay_error
/// when the sampled state has non-negligible boundary amplitude.
GridState from_function(const GridSpec& spec,
                        const std::function<cplx(std::span<const double>)>& psi);

/// Projects onto the (anti)symmetric subspace: average of amps over all N!
/// axis permutations, signed by parity for the fermionic case, then
/// renormalized. Throws degenerate_projection_error when the projection
/// annihilates the state.
GridState symmetrize(const GridState& s, Symmetry kind);

/// Residuals ||(O T - T O) s|| / ||O s|| for every transposition T and the
/// collective observables Q = sum Q_i, P = sum P_i, plus the same residual
/// for the single-particle Q_1 as a positive control (Q_1 is not
/// permutation-invariant, so its residual is large on generic states).
struct PermutationCheck {
    struct Entry {
        int i, j;           // transposed particles (1-based)
        std::string observable;
        double residual;
    };
    std::vector<Entry> collective; // Q and P rows per transposition
    std::vector<Entry> control;    // Q_1 rows per transposition
    double max_collective() const;
    double min_control() const;
};
PermutationCheck permutation_commutation_check(const GridState& s, const Constants& c = {});

/// Position moments by midpoint quadrature; momentum moments by DFT along
/// the relevant axes with p = hbar * 2*pi*m / (M*dx), m in [-M/2, M/2).
/// <P_i P_j> for i != j transforms both axes and integrates p_i p_j
/// against the transformed density. Throws boundary_decay_error when the
/// state fails the decay check (momentum moments would alias).
MomentTable moments(const GridState& s, const Constants& c = {});

enum class Collective { Q, P };

/// Variance of the collective operator applied directly to the amplitudes,
/// bypassing the covariance decomposition. Independent check of
/// collective_dispersions(moments(s)).
double collective_operator_variance(const GridState& s, Collective which,
                                    const Constants& c = {});

/// Binary container round-trip (bit-exact): header "GURG", version,
/// n_particles, points_per_axis, x_min, x_max, symmetry tag, then
/// little-endian complex-double amplitudes in row-major axis order.
void write_grid(std::ostream& os, const GridState& s);
GridState read_grid(std::istream& is, std::size_t memory_cap = std::size_t{1} << 24);

// Low-level helpers shared with the operator layer.
namespace detail {
/// In-place DFT along one axis (sign -1 forward, +1 backward, unnormalized).
void fft_axis(std::vector<cplx>& amps, const GridSpec& spec, int axis, int sign);
/// Momentum value for DFT bin m on an M-point axis.
double momentum_of_bin(int m, int points, double dx, double hbar);
/// amps with axes a and b transposed.
std::vector<cplx> transpose_axes(const std::vector<cplx>& amps, const GridSpec& spec,
                                 int a, int b);
} // namespace detail

} // namespace gur
