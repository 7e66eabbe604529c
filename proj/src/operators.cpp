#include "gur/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gur/errors.hpp"

namespace gur {

GridOperator GridOperator::position(int particle, double coeff) {
    return {{{coeff, false, particle}}};
}

GridOperator GridOperator::momentum(int particle, double coeff) {
    return {{{coeff, true, particle}}};
}

GridOperator GridOperator::collective_position(int n) {
    GridOperator op;
    for (int i = 1; i <= n; ++i) op.terms.push_back({1.0, false, i});
    return op;
}

GridOperator GridOperator::collective_momentum(int n) {
    GridOperator op;
    for (int i = 1; i <= n; ++i) op.terms.push_back({1.0, true, i});
    return op;
}

GridOperator GridOperator::operator+(const GridOperator& other) const {
    GridOperator out = *this;
    out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
    return out;
}

std::string GridOperator::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) os << "+";
        if (terms[i].coeff != 1.0) os << terms[i].coeff << "*";
        os << (terms[i].is_momentum ? "P" : "Q") << terms[i].particle;
    }
    return os.str();
}

std::vector<cplx> apply(const GridOperator& op, const GridState& s, const Constants& c) {
    const int n = s.spec.n_particles;
    const int m = s.spec.points_per_axis;
    std::vector<cplx> out(s.amps.size(), cplx{0.0});

    for (const auto& term : op.terms) {
        if (term.particle < 1 || term.particle > n)
            throw std::invalid_argument("apply: operator addresses particle " +
                                        std::to_string(term.particle) + " of an n=" +
                                        std::to_string(n) + " state");
        const int axis = term.particle - 1;
        std::size_t stride = 1;
        for (int a = axis + 1; a < n; ++a) stride *= static_cast<std::size_t>(m);

        if (!term.is_momentum) {
            for (std::size_t flat = 0; flat < out.size(); ++flat) {
                const int k = static_cast<int>((flat / stride) % static_cast<std::size_t>(m));
                out[flat] += term.coeff * s.spec.coord(k) * s.amps[flat];
            }
        } else {
            std::vector<cplx> work = s.amps;
            detail::fft_axis(work, s.spec, axis, -1);
            for (std::size_t flat = 0; flat < work.size(); ++flat) {
                const int k = static_cast<int>((flat / stride) % static_cast<std::size_t>(m));
                work[flat] *= detail::momentum_of_bin(k, m, s.spec.dx(), c.hbar);
            }
            detail::fft_axis(work, s.spec, axis, +1);
            const double inv = term.coeff / static_cast<double>(m);
            for (std::size_t flat = 0; flat < out.size(); ++flat) out[flat] += inv * work[flat];
        }
    }

    const std::string diag = boundary_decay_diagnostic(out, s.spec);
    if (!diag.empty())
        throw boundary_decay_error("apply: operator " + op.describe() +
                                   " leaves the boundary-decay envelope: " + diag);
    return out;
}

} // namespace gur
