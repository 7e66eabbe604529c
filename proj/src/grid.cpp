#include "gur/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gur/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "grid container I/O assumes a little-endian host");

namespace gur {

namespace {

bool mutation_active(const char* which) {
    const char* env = std::getenv("GUR_MUTATE");
    return env != nullptr && std::string(env) == which;
}

std::size_t ipow(std::size_t base, int exp) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// stride of an axis in the row-major layout (axis 0 slowest)
std::size_t axis_stride(const GridSpec& spec, int axis) {
    return ipow(static_cast<std::size_t>(spec.points_per_axis),
                spec.n_particles - 1 - axis);
}

int axis_index(std::size_t flat, std::size_t stride, int points) {
    return static_cast<int>((flat / stride) % static_cast<std::size_t>(points));
}

// All permutations of {0..n-1} with parity signs, identity first.
std::vector<std::pair<std::array<int, 3>, int>> permutations(int n) {
    std::vector<std::pair<std::array<int, 3>, int>> out;
    std::array<int, 3> p = {0, 1, 2};
    std::vector<int> idx(p.begin(), p.begin() + n);
    std::sort(idx.begin(), idx.end());
    do {
        int inversions = 0;
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                if (idx[a] > idx[b]) ++inversions;
        std::array<int, 3> perm = {0, 1, 2};
        std::copy(idx.begin(), idx.end(), perm.begin());
        out.emplace_back(perm, inversions % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

// amps reindexed by an axis permutation: out(t) = in(t o perm).
std::vector<cplx> permute_axes(const std::vector<cplx>& amps, const GridSpec& spec,
                               const std::array<int, 3>& perm) {
    const int n = spec.n_particles;
    const int m = spec.points_per_axis;
    std::vector<cplx> out(amps.size());
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(spec, a);
    std::array<int, 3> t = {0, 0, 0};
    for (std::size_t flat = 0; flat < amps.size(); ++flat) {
        for (int a = 0; a < n; ++a) t[a] = axis_index(flat, stride[a], m);
        std::size_t src = 0;
        for (int a = 0; a < n; ++a) src += static_cast<std::size_t>(t[perm[a]]) * stride[a];
        out[flat] = amps[src];
    }
    return out;
}

void scale(std::vector<cplx>& amps, double factor) {
    for (auto& a : amps) a *= factor;
}

} // namespace

const char* to_string(Symmetry s) {
    switch (s) {
        case Symmetry::none: return "none";
        case Symmetry::bosonic: return "bosonic";
        case Symmetry::fermionic: return "fermionic";
    }
    throw std::logic_error("to_string: unknown Symmetry");
}

GridSpec::GridSpec(int n, int points, double lo, double hi, std::size_t cap)
    : n_particles(n), points_per_axis(points), x_min(lo), x_max(hi), memory_cap(cap) {
    if (n_particles < 1 || n_particles > 3)
        throw std::invalid_argument("GridSpec: n_particles must be 1, 2 or 3");
    if (points_per_axis < 16 || (points_per_axis & (points_per_axis - 1)) != 0)
        throw std::invalid_argument("GridSpec: points_per_axis must be a power of two >= 16");
    if (!(x_max > x_min))
        throw std::invalid_argument("GridSpec: x_max must exceed x_min");
    if (total_points() > memory_cap) {
        std::ostringstream os;
        os << "GridSpec: " << total_points() << " amplitudes exceed the memory cap of "
           << memory_cap;
        throw std::invalid_argument(os.str());
    }
}

std::size_t GridSpec::total_points() const {
    return ipow(static_cast<std::size_t>(points_per_axis), n_particles);
}

double grid_norm(std::span<const cplx> amps, const GridSpec& spec) {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s * std::pow(spec.dx(), spec.n_particles));
}

cplx grid_inner(std::span<const cplx> bra, std::span<const cplx> ket, const GridSpec& spec) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
    return s * std::pow(spec.dx(), spec.n_particles);
}

std::string boundary_decay_diagnostic(std::span<const cplx> amps, const GridSpec& spec) {
    const int n = spec.n_particles;
    const int m = spec.points_per_axis;
    double peak = 0.0;
    for (const auto& a : amps) peak = std::max(peak, std::abs(a));
    if (peak == 0.0) return "state has no amplitude";

    // max |amp| per (axis, side) over the outermost layer
    std::array<std::array<double, 2>, 3> layer_max{};
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(spec, a);
    for (std::size_t flat = 0; flat < amps.size(); ++flat) {
        for (int a = 0; a < n; ++a) {
            const int k = axis_index(flat, stride[a], m);
            if (k == 0)
                layer_max[a][0] = std::max(layer_max[a][0], std::abs(amps[flat]));
            else if (k == m - 1)
                layer_max[a][1] = std::max(layer_max[a][1], std::abs(amps[flat]));
        }
    }
    std::ostringstream os;
    for (int a = 0; a < n; ++a) {
        for (int side = 0; side < 2; ++side) {
            const double ratio = layer_max[a][side] / peak;
            if (ratio > 1e-6) {
                if (os.tellp() > 0) os << "; ";
                os << "particle " << a + 1 << " at "
                   << (side == 0 ? "x_min = " : "x_max = ")
                   << (side == 0 ? spec.x_min : spec.x_max) << " carries |amp|/peak = "
                   << ratio << " (limit 1e-6)";
            }
        }
    }
    return os.str();
}

void validate(const GridState& s) {
    if (s.amps.size() != s.spec.total_points())
        throw std::invalid_argument("GridState: amplitude count does not match the spec");
    const double norm = grid_norm(s.amps, s.spec);
    if (std::abs(norm * norm - 1.0) > 1e-10)
        throw std::invalid_argument("GridState: not normalized (|norm^2 - 1| = " +
                                    std::to_string(std::abs(norm * norm - 1.0)) + ")");
    const std::string diag = boundary_decay_diagnostic(s.amps, s.spec);
    if (!diag.empty())
        throw boundary_decay_error("GridState: boundary decay violated: " + diag);
    if (s.symmetry != Symmetry::none && s.spec.n_particles >= 2) {
        const double sign = s.symmetry == Symmetry::bosonic ? 1.0 : -1.0;
        for (int i = 0; i < s.spec.n_particles; ++i) {
            for (int j = i + 1; j < s.spec.n_particles; ++j) {
                const auto swapped = detail::transpose_axes(s.amps, s.spec, i, j);
                double diff2 = 0.0;
                for (std::size_t k = 0; k < s.amps.size(); ++k)
                    diff2 += std::norm(s.amps[k] - sign * swapped[k]);
                diff2 *= std::pow(s.spec.dx(), s.spec.n_particles);
                if (std::sqrt(diff2) > 1e-10)
                    throw std::invalid_argument(
                        "GridState: symmetry tag inconsistent under transposition");
            }
        }
    }
}

GridState from_function(const GridSpec& spec,
                        const std::function<cplx(std::span<const double>)>& psi) {
    const int n = spec.n_particles;
    const int m = spec.points_per_axis;
    std::vector<double> coords(m);
    for (int k = 0; k < m; ++k) coords[k] = spec.coord(k);

    GridState out;
    out.spec = spec;
    out.amps.resize(spec.total_points());
    std::array<double, 3> x = {0.0, 0.0, 0.0};
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(spec, a);
    for (std::size_t flat = 0; flat < out.amps.size(); ++flat) {
        for (int a = 0; a < n; ++a) x[a] = coords[axis_index(flat, stride[a], m)];
        const cplx v = psi(std::span<const double>(x.data(), n));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("from_function: psi is not finite on the grid");
        out.amps[flat] = v;
    }

    const double norm = grid_norm(out.amps, spec);
    if (!(norm > 1e-150))
        throw std::invalid_argument("from_function: normalization underflow (all-zero sample)");
    scale(out.amps, 1.0 / norm);

    const std::string diag = boundary_decay_diagnostic(out.amps, spec);
    if (!diag.empty())
        throw boundary_decay_error("from_function: boundary decay violated: " + diag);
    out.symmetry = Symmetry::none;
    return out;
}

GridState symmetrize(const GridState& s, Symmetry kind) {
    if (kind == Symmetry::none)
        throw std::invalid_argument("symmetrize: kind must be bosonic or fermionic");
    const int n = s.spec.n_particles;
    GridState out;
    out.spec = s.spec;
    out.amps.assign(s.amps.size(), cplx{0.0});
    const auto perms = permutations(n);
    for (const auto& [perm, parity] : perms) {
        const double sign = kind == Symmetry::fermionic ? parity : 1.0;
        const auto permuted = permute_axes(s.amps, s.spec, perm);
        for (std::size_t k = 0; k < out.amps.size(); ++k)
            out.amps[k] += sign * permuted[k];
    }
    scale(out.amps, 1.0 / static_cast<double>(perms.size()));

    const double norm = grid_norm(out.amps, s.spec);
    if (norm < 1e-8)
        throw degenerate_projection_error(
            std::string("symmetrize: ") + to_string(kind) +
            " projection annihilates the state (residual norm " + std::to_string(norm) + ")");
    scale(out.amps, 1.0 / norm);
    out.symmetry = kind;
    return out;
}

namespace detail {

void fft_axis(std::vector<cplx>& amps, const GridSpec& spec, int axis, int sign) {
    const int m = spec.points_per_axis;
    const std::size_t stride = axis_stride(spec, axis);
    const std::size_t block = stride * static_cast<std::size_t>(m);

    fftw_complex* buf = fftw_alloc_complex(m);
    fftw_plan plan = fftw_plan_dft_1d(m, buf, buf,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
    for (std::size_t outer = 0; outer < amps.size(); outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t base = outer + inner;
            for (int t = 0; t < m; ++t) {
                const cplx v = amps[base + static_cast<std::size_t>(t) * stride];
                buf[t][0] = v.real();
                buf[t][1] = v.imag();
            }
            fftw_execute(plan);
            for (int t = 0; t < m; ++t)
                amps[base + static_cast<std::size_t>(t) * stride] = cplx(buf[t][0], buf[t][1]);
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
}

double momentum_of_bin(int m, int points, double dx, double hbar) {
    const int f = m < points / 2 ? m : m - points;
    return hbar * 2.0 * M_PI * static_cast<double>(f) /
           (static_cast<double>(points) * dx);
}

std::vector<cplx> transpose_axes(const std::vector<cplx>& amps, const GridSpec& spec,
                                 int a, int b) {
    std::array<int, 3> perm = {0, 1, 2};
    std::swap(perm[a], perm[b]);
    return permute_axes(amps, spec, perm);
}

} // namespace detail

namespace {

// O s for the collective observables, as raw (non-normalized) arrays
std::vector<cplx> apply_collective_q(const GridState& s) {
    const int n = s.spec.n_particles;
    const int m = s.spec.points_per_axis;
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(s.spec, a);
    std::vector<cplx> out(s.amps.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        double xsum = 0.0;
        for (int a = 0; a < n; ++a) xsum += s.spec.coord(axis_index(flat, stride[a], m));
        out[flat] = xsum * s.amps[flat];
    }
    return out;
}

std::vector<cplx> apply_collective_p(const GridState& s, double hbar) {
    const int n = s.spec.n_particles;
    const int m = s.spec.points_per_axis;
    std::vector<cplx> work = s.amps;
    for (int a = 0; a < n; ++a) detail::fft_axis(work, s.spec, a, -1);
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(s.spec, a);
    for (std::size_t flat = 0; flat < work.size(); ++flat) {
        double psum = 0.0;
        for (int a = 0; a < n; ++a)
            psum += detail::momentum_of_bin(axis_index(flat, stride[a], m), m, s.spec.dx(), hbar);
        work[flat] *= psum;
    }
    for (int a = 0; a < n; ++a) detail::fft_axis(work, s.spec, a, +1);
    scale(work, 1.0 / std::pow(static_cast<double>(m), n));
    return work;
}

std::vector<cplx> apply_q1(const GridState& s) {
    const int m = s.spec.points_per_axis;
    const std::size_t stride = axis_stride(s.spec, 0);
    std::vector<cplx> out(s.amps.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat)
        out[flat] = s.spec.coord(axis_index(flat, stride, m)) * s.amps[flat];
    return out;
}

double l2(const std::vector<cplx>& v, const GridSpec& spec) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return std::sqrt(s * std::pow(spec.dx(), spec.n_particles));
}

double commutation_residual(const std::vector<cplx>& o_of_ts, const std::vector<cplx>& os,
                            const GridSpec& spec, int i, int j) {
    const auto t_of_os = detail::transpose_axes(os, spec, i, j);
    double diff2 = 0.0;
    for (std::size_t k = 0; k < os.size(); ++k) diff2 += std::norm(o_of_ts[k] - t_of_os[k]);
    const double denom = l2(os, spec);
    return std::sqrt(diff2 * std::pow(spec.dx(), spec.n_particles)) / denom;
}

} // namespace

double PermutationCheck::max_collective() const {
    double worst = 0.0;
    for (const auto& e : collective) worst = std::max(worst, e.residual);
    return worst;
}

double PermutationCheck::min_control() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : control) best = std::min(best, e.residual);
    return best;
}

PermutationCheck permutation_commutation_check(const GridState& s, const Constants& c) {
    if (s.spec.n_particles < 2)
        throw precondition_error("permutation_commutation_check: needs n_particles >= 2");

    const auto qs = apply_collective_q(s);
    const auto ps = apply_collective_p(s, c.hbar);
    const auto q1s = apply_q1(s);

    PermutationCheck out;
    for (int i = 0; i < s.spec.n_particles; ++i) {
        for (int j = i + 1; j < s.spec.n_particles; ++j) {
            GridState swapped;
            swapped.spec = s.spec;
            swapped.amps = detail::transpose_axes(s.amps, s.spec, i, j);
            swapped.symmetry = Symmetry::none;

            const auto q_of_ts = apply_collective_q(swapped);
            const auto p_of_ts = apply_collective_p(swapped, c.hbar);
            const auto q1_of_ts = apply_q1(swapped);

            out.collective.push_back(
                {i + 1, j + 1, "Q", commutation_residual(q_of_ts, qs, s.spec, i, j)});
            out.collective.push_back(
                {i + 1, j + 1, "P", commutation_residual(p_of_ts, ps, s.spec, i, j)});
            out.control.push_back(
                {i + 1, j + 1, "Q_1", commutation_residual(q1_of_ts, q1s, s.spec, i, j)});
        }
    }
    return out;
}

MomentTable moments(const GridState& s, const Constants& c) {
    const std::string diag = boundary_decay_diagnostic(s.amps, s.spec);
    if (!diag.empty())
        throw boundary_decay_error("moments: " + diag);

    const int n = s.spec.n_particles;
    const int m = s.spec.points_per_axis;
    const double dx = s.spec.dx();
    const double cell = std::pow(dx, n);
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(s.spec, a);
    std::vector<double> coords(m);
    for (int k = 0; k < m; ++k) coords[k] = s.spec.coord(k);

    MomentTable t;
    t.n = n;
    t.mean_q = Eigen::VectorXd::Zero(n);
    t.mean_p = Eigen::VectorXd::Zero(n);
    t.cov_q = Eigen::MatrixXd::Zero(n, n);
    t.cov_p = Eigen::MatrixXd::Zero(n, n);

    // position moments in one quadrature pass
    Eigen::MatrixXd qq = Eigen::MatrixXd::Zero(n, n);
    std::array<double, 3> x = {0.0, 0.0, 0.0};
    for (std::size_t flat = 0; flat < s.amps.size(); ++flat) {
        const double rho = std::norm(s.amps[flat]) * cell;
        if (rho == 0.0) continue;
        for (int a = 0; a < n; ++a) x[a] = coords[axis_index(flat, stride[a], m)];
        for (int a = 0; a < n; ++a) {
            t.mean_q(a) += x[a] * rho;
            for (int b = a; b < n; ++b) qq(a, b) += x[a] * x[b] * rho;
        }
    }

    // single-axis momentum moments
    std::vector<double> pvals(m);
    for (int k = 0; k < m; ++k) pvals[k] = detail::momentum_of_bin(k, m, dx, c.hbar);
    Eigen::MatrixXd pp = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        std::vector<cplx> work = s.amps;
        detail::fft_axis(work, s.spec, a, -1);
        const double w = cell / static_cast<double>(m);
        for (std::size_t flat = 0; flat < work.size(); ++flat) {
            const double rho = std::norm(work[flat]) * w;
            if (rho == 0.0) continue;
            const double p = pvals[axis_index(flat, stride[a], m)];
            t.mean_p(a) += p * rho;
            pp(a, a) += p * p * rho;
        }
    }

    // cross momentum moments: transform both axes, integrate p_i p_j
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            std::vector<cplx> work = s.amps;
            detail::fft_axis(work, s.spec, a, -1);
            detail::fft_axis(work, s.spec, b, -1);
            const double w = cell / static_cast<double>(m) / static_cast<double>(m);
            double acc = 0.0;
            for (std::size_t flat = 0; flat < work.size(); ++flat) {
                const double rho = std::norm(work[flat]) * w;
                if (rho == 0.0) continue;
                acc += pvals[axis_index(flat, stride[a], m)] *
                       pvals[axis_index(flat, stride[b], m)] * rho;
            }
            pp(a, b) = acc;
        }
    }

    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            t.cov_q(a, b) = qq(a, b) - t.mean_q(a) * t.mean_q(b);
            t.cov_q(b, a) = t.cov_q(a, b);
            t.cov_p(a, b) = pp(a, b) - t.mean_p(a) * t.mean_p(b);
            t.cov_p(b, a) = t.cov_p(a, b);
        }
    }

    if (n >= 2 && mutation_active("grid_qcf_sign")) {
        // Test hook mirroring the gaussian engine's; see gaussian.cpp.
        t.cov_q(0, 1) = -t.cov_q(0, 1);
        t.cov_q(1, 0) = -t.cov_q(1, 0);
    }
    validate(t);
    return t;
}

double collective_operator_variance(const GridState& s, Collective which, const Constants& c) {
    const std::string diag = boundary_decay_diagnostic(s.amps, s.spec);
    if (!diag.empty())
        throw boundary_decay_error("collective_operator_variance: " + diag);

    const int n = s.spec.n_particles;
    const int m = s.spec.points_per_axis;
    std::array<std::size_t, 3> stride = {0, 0, 0};
    for (int a = 0; a < n; ++a) stride[a] = axis_stride(s.spec, a);

    std::vector<cplx> rep = s.amps;
    double weight = std::pow(s.spec.dx(), n);
    if (which == Collective::P) {
        for (int a = 0; a < n; ++a) detail::fft_axis(rep, s.spec, a, -1);
        weight /= std::pow(static_cast<double>(m), n);
    }
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t flat = 0; flat < rep.size(); ++flat) {
        const double rho = std::norm(rep[flat]) * weight;
        if (rho == 0.0) continue;
        double sum = 0.0;
        for (int a = 0; a < n; ++a) {
            const int k = axis_index(flat, stride[a], m);
            sum += which == Collective::Q ? s.spec.coord(k)
                                          : detail::momentum_of_bin(k, m, s.spec.dx(), c.hbar);
        }
        e1 += sum * rho;
        e2 += sum * sum * rho;
    }
    return e2 - e1 * e1;
}

void write_grid(std::ostream& os, const GridState& s) {
    os.write("GURG", 4);
    const std::uint32_t version = 1;
    const std::uint32_t n = static_cast<std::uint32_t>(s.spec.n_particles);
    const std::uint32_t m = static_cast<std::uint32_t>(s.spec.points_per_axis);
    const std::uint8_t sym = static_cast<std::uint8_t>(s.symmetry);
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&m), sizeof m);
    os.write(reinterpret_cast<const char*>(&s.spec.x_min), sizeof(double));
    os.write(reinterpret_cast<const char*>(&s.spec.x_max), sizeof(double));
    os.write(reinterpret_cast<const char*>(&sym), sizeof sym);
    os.write(reinterpret_cast<const char*>(s.amps.data()),
             static_cast<std::streamsize>(s.amps.size() * sizeof(cplx)));
    if (!os) throw std::runtime_error("write_grid: stream failure");
}

GridState read_grid(std::istream& is, std::size_t memory_cap) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "GURG", 4) != 0)
        throw std::runtime_error("read_grid: bad magic, not a grid container");
    std::uint32_t version = 0, n = 0, m = 0;
    double lo = 0.0, hi = 0.0;
    std::uint8_t sym = 0;
    is.read(reinterpret_cast<char*>(&version), sizeof version);
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&m), sizeof m);
    is.read(reinterpret_cast<char*>(&lo), sizeof lo);
    is.read(reinterpret_cast<char*>(&hi), sizeof hi);
    is.read(reinterpret_cast<char*>(&sym), sizeof sym);
    if (!is) throw std::runtime_error("read_grid: truncated header");
    if (version != 1) throw std::runtime_error("read_grid: unsupported version");
    if (sym > 2) throw std::runtime_error("read_grid: bad symmetry tag");

    GridState out;
    out.spec = GridSpec(static_cast<int>(n), static_cast<int>(m), lo, hi, memory_cap);
    out.symmetry = static_cast<Symmetry>(sym);
    out.amps.resize(out.spec.total_points());
    is.read(reinterpret_cast<char*>(out.amps.data()),
            static_cast<std::streamsize>(out.amps.size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("read_grid: truncated amplitude block");
    validate(out);
    return out;
}

} // namespace gur
