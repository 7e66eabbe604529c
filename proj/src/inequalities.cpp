#include "gur/inequalities.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gur/errors.hpp"

namespace gur {

SuiteConfig::SuiteConfig(double hbar_, double tol_) : hbar(hbar_), tol(tol_) {
    if (!(hbar > 0.0)) throw std::invalid_argument("SuiteConfig: hbar must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("SuiteConfig: tol must be positive");
}

namespace {

void require_n(const MomentTable& m, int n, const char* who) {
    if (m.n != n) {
        std::ostringstream os;
        os << who << ": needs an n=" << n << " moment table, got n=" << m.n;
        throw std::invalid_argument(os.str());
    }
}

// off-diagonal sum over ordered pairs i != j
double offdiag_sum(const Eigen::MatrixXd& c) {
    return c.sum() - c.trace();
}

} // namespace

InequalityReport robertson(const GridState& s, const GridOperator& a, const GridOperator& b,
                           const SuiteConfig& cfg) {
    const Constants consts{cfg.hbar};
    const auto as = apply(a, s, consts);
    const auto bs = apply(b, s, consts);

    // For Hermitian A: <A> = <s|As>, <A^2> = <As|As>, and
    // <[A,B]> = <As|Bs> - <Bs|As> = 2i Im <As|Bs>.
    const double mean_a = grid_inner(s.amps, as, s.spec).real();
    const double mean_b = grid_inner(s.amps, bs, s.spec).real();
    const double sq_a = grid_inner(as, as, s.spec).real();
    const double sq_b = grid_inner(bs, bs, s.spec).real();
    const cplx cross = grid_inner(as, bs, s.spec);

    const double var_a = sq_a - mean_a * mean_a;
    const double var_b = sq_b - mean_b * mean_b;
    const double comm_imag = 2.0 * cross.imag();

    auto rep = make_report(Relation::robertson, s.spec.n_particles, var_a * var_b,
                           comm_imag * comm_imag / 4.0, cfg.tol,
                           {{"var_a", var_a},
                            {"var_b", var_b},
                            {"commutator_imag", comm_imag}});
    return rep;
}

InequalityReport collective_gur(const MomentTable& m, const SuiteConfig& cfg) {
    const auto d = collective_dispersions(m);
    const double rhs = std::pow(m.n * cfg.hbar, 2) / 4.0;
    return make_report(Relation::collective_gur, m.n, d.dq2 * d.dp2, rhs, cfg.tol,
                       {{"dq2", d.dq2}, {"dp2", d.dp2}});
}

InequalityReport gur_split(const MomentTable& m, const SuiteConfig& cfg) {
    const double diag_q = m.cov_q.trace();
    const double diag_p = m.cov_p.trace();
    const double off_q = offdiag_sum(m.cov_q);
    const double off_p = offdiag_sum(m.cov_p);
    const double lhs = (diag_q + off_q) * (diag_p + off_p);
    const double rhs = std::pow(m.n * cfg.hbar, 2) / 4.0;
    return make_report(Relation::gur_n, m.n, lhs, rhs, cfg.tol,
                       {{"diag_q", diag_q},
                        {"offdiag_q", off_q},
                        {"diag_p", diag_p},
                        {"offdiag_p", off_p}});
}

InequalityReport gur_pair(const MomentTable& m, const SuiteConfig& cfg) {
    require_n(m, 2, "gur_pair");
    const double factor_q = 0.5 * m.var_q(0) + 0.5 * m.var_q(1) + m.cov_q(0, 1);
    const double factor_p = 0.5 * m.var_p(0) + 0.5 * m.var_p(1) + m.cov_p(0, 1);
    const double rhs = cfg.hbar * cfg.hbar / 4.0;
    return make_report(Relation::gur_two, 2, factor_q * factor_p, rhs, cfg.tol,
                       {{"factor_q", factor_q}, {"factor_p", factor_p}});
}

InequalityReport schwarz_pair_bound(const MomentTable& m, Quadrature which,
                                    const SuiteConfig& cfg) {
    require_n(m, 2, "schwarz_pair_bound");
    const Eigen::MatrixXd& c = which == Quadrature::Q ? m.cov_q : m.cov_p;
    const double half_var_sum = 0.5 * c(0, 0) + 0.5 * c(1, 1);
    const double qcf = c(0, 1);
    const Relation name =
        which == Quadrature::Q ? Relation::schwarz_q_two : Relation::schwarz_p_two;
    return make_report(name, 2, half_var_sum - std::abs(qcf), 0.0, cfg.tol,
                       {{"qcf", qcf},
                        {"qcf_abs", std::abs(qcf)},
                        {"half_var_sum", half_var_sum}});
}

InequalityReport gur_two_bound(const MomentTable& m, const SuiteConfig& cfg) {
    require_n(m, 2, "gur_two_bound");
    const double sum_q = m.var_q(0) + m.var_q(1);
    const double sum_p = m.var_p(0) + m.var_p(1);
    const double rhs = cfg.hbar * cfg.hbar / 4.0;
    return make_report(Relation::gur_two_bound, 2, sum_q * sum_p, rhs, cfg.tol,
                       {{"var_sum_q", sum_q}, {"var_sum_p", sum_p}});
}

InequalityReport symmetric_product_bound(const MomentTable& m, const SuiteConfig& cfg) {
    if (m.n != 2 && m.n != 3)
        throw std::invalid_argument("symmetric_product_bound: needs n = 2 or 3");
    for (int axis = 0; axis < 2; ++axis) {
        const Eigen::MatrixXd& c = axis == 0 ? m.cov_q : m.cov_p;
        for (int i = 0; i < m.n; ++i) {
            for (int j = i + 1; j < m.n; ++j) {
                const double di = std::sqrt(c(i, i));
                const double dj = std::sqrt(c(j, j));
                if (std::abs(di - dj) > 1e-6 * std::max({di, dj, 1e-300})) {
                    std::ostringstream os;
                    os << "symmetric_product_bound: " << (axis == 0 ? "Q" : "P")
                       << " dispersions differ between particles " << i + 1 << " and " << j + 1
                       << " (" << di << " vs " << dj << ")";
                    throw precondition_error(os.str());
                }
            }
        }
    }
    const double lhs = std::sqrt(m.var_q(0)) * std::sqrt(m.var_p(0));
    const double rhs = m.n == 2 ? cfg.hbar / 4.0 : cfg.hbar / 8.0;
    const Relation name = m.n == 2 ? Relation::symmetric_two : Relation::symmetric_three;
    return make_report(name, m.n, lhs, rhs, cfg.tol, {{"hur_reference", cfg.hbar / 2.0}});
}

std::vector<InequalityReport> schwarz_triple_bounds(const MomentTable& m, Quadrature which,
                                                    const SuiteConfig& cfg) {
    require_n(m, 3, "schwarz_triple_bounds");
    const Eigen::MatrixXd& c = which == Quadrature::Q ? m.cov_q : m.cov_p;
    const Relation name =
        which == Quadrature::Q ? Relation::schwarz_three_q : Relation::schwarz_three_p;
    const double var_sum = c.trace();

    std::vector<InequalityReport> out;
    // all 2^3 sign vectors; global flips duplicate the bound and guard the
    // a_i a_j combinatorics
    for (int bits = 0; bits < 8; ++bits) {
        const double a1 = bits & 1 ? -1.0 : 1.0;
        const double a2 = bits & 2 ? -1.0 : 1.0;
        const double a3 = bits & 4 ? -1.0 : 1.0;
        const double rhs =
            -2.0 * (a1 * a2 * c(0, 1) + a1 * a3 * c(0, 2) + a2 * a3 * c(1, 2));
        out.push_back(make_report(name, 3, var_sum, rhs, cfg.tol,
                                  {{"a1", a1}, {"a2", a2}, {"a3", a3}}));
    }

    // combined two-sided bound: -sum var <= sum_{i!=j} C <= 3 sum var,
    // reported with slack = min of the two margins
    const double qcf_sum = 2.0 * (c(0, 1) + c(0, 2) + c(1, 2));
    const double lower_margin = qcf_sum + var_sum;
    const double upper_margin = 3.0 * var_sum - qcf_sum;
    InequalityReport combined;
    combined.name = name;
    combined.n = 3;
    combined.lhs = qcf_sum;
    combined.rhs = -var_sum;
    combined.slack = std::min(lower_margin, upper_margin);
    combined.holds = combined.slack >= -cfg.tol;
    combined.sub_values = {{"two_sided", 1.0},
                           {"lower_bound", -var_sum},
                           {"upper_bound", 3.0 * var_sum},
                           {"lower_margin", lower_margin},
                           {"upper_margin", upper_margin}};
    out.push_back(std::move(combined));
    return out;
}

InequalityReport gur_three_bound(const MomentTable& m, const SuiteConfig& cfg) {
    require_n(m, 3, "gur_three_bound");
    const double sum_q = m.cov_q.trace();
    const double sum_p = m.cov_p.trace();
    const double rhs = 9.0 * cfg.hbar * cfg.hbar / 64.0;
    return make_report(Relation::gur_three_bound, 3, sum_q * sum_p, rhs, cfg.tol,
                       {{"var_sum_q", sum_q}, {"var_sum_p", sum_p}});
}

std::vector<InequalityReport> evaluate_applicable(const MomentTable& m, const SuiteConfig& cfg) {
    std::vector<InequalityReport> out;
    out.push_back(collective_gur(m, cfg));
    out.push_back(gur_split(m, cfg));
    if (m.n == 2) {
        out.push_back(gur_pair(m, cfg));
        out.push_back(schwarz_pair_bound(m, Quadrature::Q, cfg));
        out.push_back(schwarz_pair_bound(m, Quadrature::P, cfg));
        out.push_back(gur_two_bound(m, cfg));
    }
    if (m.n == 3) {
        for (auto& r : schwarz_triple_bounds(m, Quadrature::Q, cfg)) out.push_back(std::move(r));
        for (auto& r : schwarz_triple_bounds(m, Quadrature::P, cfg)) out.push_back(std::move(r));
        out.push_back(gur_three_bound(m, cfg));
    }
    if (m.n == 2 || m.n == 3) {
        try {
            out.push_back(symmetric_product_bound(m, cfg));
        } catch (const precondition_error&) {
            // equal-dispersion preparation not met; relation not applicable
        }
    }
    return out;
}

} // namespace gur
