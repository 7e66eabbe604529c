#include "gur/battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gur/errors.hpp"
#include "gur/gaussian.hpp"
#include "gur/grid.hpp"
#include "gur/inequalities.hpp"
#include "gur/numfmt.hpp"
#include "gur/operators.hpp"

namespace gur {

namespace {

struct Collector {
    std::vector<OutputRow> rows;

    // An exception while building or evaluating a battery state is a
    // verification failure (a broken engine), not a usage error: it lands
    // in the stream as a failed check row and flips the exit code.
    template <class Fn>
    void guarded(const std::string& engine, const std::string& state, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            OutputRow row;
            row.name = "check:engine_error";
            row.n = 0;
            row.engine = engine;
            row.holds = false;
            row.state_descriptor = state + " : " + e.what();
            rows.push_back(std::move(row));
        }
    }

    void add_reports(std::vector<InequalityReport> reps, const std::string& engine,
                     const std::string& state) {
        for (auto& rep : reps) {
            rep.engine = engine;
            rep.state_descriptor = state;
            rows.push_back(to_row(rep));
        }
    }

    void add_check(const std::string& name, int n, const std::string& engine, double measured,
                   double threshold, bool pass, const std::string& state,
                   std::map<std::string, double> subs = {}) {
        OutputRow row;
        row.name = name;
        row.n = n;
        row.engine = engine;
        row.lhs = measured;
        row.rhs = threshold;
        row.slack = pass ? std::abs(measured - threshold) : -(std::abs(measured - threshold));
        row.holds = pass;
        row.sub_values = std::move(subs);
        row.state_descriptor = state;
        rows.push_back(std::move(row));
    }
};

std::string tms_descriptor(double r) {
    return "two_mode_squeezed(r=" + format_double(r) + ")";
}

std::string triple_descriptor(double r) {
    return "correlated_triple(r=" + format_double(r) + ")";
}

// the closed-form squeezed-pair wavefunction for grid sampling
cplx tms_wavefunction(double x1, double x2, double r, double hbar) {
    const double u2 = (x1 + x2) * (x1 + x2);
    const double v2 = (x1 - x2) * (x1 - x2);
    return {std::exp(-(std::exp(-2.0 * r) * u2 + std::exp(2.0 * r) * v2) / (4.0 * hbar)), 0.0};
}

double max_table_diff(const MomentTable& a, const MomentTable& b) {
    double worst = 0.0;
    worst = std::max(worst, (a.mean_q - b.mean_q).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.mean_p - b.mean_p).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.cov_q - b.cov_q).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.cov_p - b.cov_p).cwiseAbs().maxCoeff());
    return worst;
}

void add_grid_state_rows(Collector& col, const GridState& s, const SuiteConfig& cfg,
                         const std::string& state,
                         const std::optional<MomentTable>& reference, double cross_tol,
                         double residual_tol) {
    const Constants consts{cfg.hbar};
    const MomentTable m = moments(s, consts);
    col.add_reports(evaluate_applicable(m, cfg), "grid", state);

    // direct collective variance vs the covariance double sums
    const auto d = collective_dispersions(m);
    const double vq = collective_operator_variance(s, Collective::Q, consts);
    const double vp = collective_operator_variance(s, Collective::P, consts);
    const double rel = std::max(std::abs(vq - d.dq2) / std::max(std::abs(vq), 1e-30),
                                std::abs(vp - d.dp2) / std::max(std::abs(vp), 1e-30));
    col.add_check("check:collective_variance", m.n, "grid", rel, 1e-8, rel <= 1e-8, state,
                  {{"direct_q", vq}, {"direct_p", vp}, {"sum_q", d.dq2}, {"sum_p", d.dp2}});

    if (reference) {
        const double diff = max_table_diff(m, *reference);
        col.add_check("check:cross_engine", m.n, "grid", diff, cross_tol, diff <= cross_tol,
                      state);
    }

    if (s.spec.n_particles >= 2) {
        const auto perm = permutation_commutation_check(s, consts);
        const double worst = perm.max_collective();
        col.add_check("check:permutation_collective", m.n, "grid", worst, residual_tol,
                      worst <= residual_tol, state);
    }

    // Robertson on the canonical pair: single-particle for n=1, the
    // collective pair otherwise (its commutator expectation is i n hbar).
    const int n = s.spec.n_particles;
    auto rob = robertson(s,
                         n == 1 ? GridOperator::position(1) : GridOperator::collective_position(n),
                         n == 1 ? GridOperator::momentum(1) : GridOperator::collective_momentum(n),
                         cfg);
    rob.engine = "grid";
    rob.state_descriptor = state;
    col.rows.push_back(to_row(rob));
}

} // namespace

BatteryOutcome run_verify_battery(const BatteryOptions& opt) {
    const Constants consts{opt.hbar};
    const SuiteConfig gauss_cfg{opt.hbar, opt.tol_override.value_or(1e-9)};
    const SuiteConfig grid_cfg{opt.hbar, opt.tol_override.value_or(1e-6)};

    Collector col;

    if (opt.run_gaussian) {
        for (int n = 1; n <= 3; ++n) {
            const std::string state = "product_vacuum(n=" + std::to_string(n) + ")";
            col.guarded("gaussian", state, [&] {
                const auto m = moments(make_product_vacuum(n, consts));
                col.add_reports(evaluate_applicable(m, gauss_cfg), "gaussian", state);
            });
        }
        for (double r : {0.0, 0.25, 0.5, 1.0, 2.0}) {
            col.guarded("gaussian", tms_descriptor(r), [&] {
                const auto m = moments(make_two_mode_squeezed(r, consts));
                col.add_reports(evaluate_applicable(m, gauss_cfg), "gaussian",
                                tms_descriptor(r));
            });
        }
        for (double r : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            col.guarded("gaussian", triple_descriptor(r), [&] {
                const auto m = moments(make_correlated_triple(r, consts));
                col.add_reports(evaluate_applicable(m, gauss_cfg), "gaussian",
                                triple_descriptor(r));
            });
        }
        for (int n : {2, 3}) {
            for (int k = 0; k < opt.random_count; ++k) {
                const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(k);
                std::ostringstream state;
                state << "random_gaussian(n=" << n << ",seed=";
                state.width(4);
                state.fill('0');
                state << seed << ")";
                col.guarded("gaussian", state.str(), [&] {
                    const auto m = moments(make_random_state(n, seed, 1.0, consts));
                    col.add_reports(evaluate_applicable(m, gauss_cfg), "gaussian", state.str());
                });
            }
        }
    }

    if (opt.run_grid) {
        const double h = opt.hbar;
        const double scale = std::sqrt(h); // grid extents follow the vacuum width
        const double residual_tol = opt.tol_override.value_or(1e-8);
        const double cross_tol_2 = opt.tol_override.value_or(1e-6);
        const double cross_tol_3 = opt.tol_override.value_or(1e-4);

        col.guarded("grid", "grid_vacuum(n=1)", [&] {
            const GridSpec spec(1, 256, -10.0 * scale, 10.0 * scale);
            const auto vac = from_function(spec, [h](std::span<const double> x) {
                return cplx(std::exp(-x[0] * x[0] / (2.0 * h)), 0.0);
            });
            add_grid_state_rows(col, vac, grid_cfg, "grid_vacuum(n=1)",
                                moments(make_product_vacuum(1, consts)), cross_tol_2,
                                residual_tol);
        });
        for (double r : {0.0, 0.5, 1.0}) {
            col.guarded("grid", "grid_" + tms_descriptor(r), [&] {
                const GridSpec spec(2, 256, -12.0 * scale, 12.0 * scale);
                const auto s = from_function(spec, [r, h](std::span<const double> x) {
                    return tms_wavefunction(x[0], x[1], r, h);
                });
                add_grid_state_rows(col, s, grid_cfg, "grid_" + tms_descriptor(r),
                                    moments(make_two_mode_squeezed(r, consts)), cross_tol_2,
                                    residual_tol);
            });
        }
        col.guarded("grid", "grid_correlated_gaussian(a=1,b=0.5)", [&] {
            // correlated pair exp(-(x1^2+x2^2)/2 - b x1 x2), b = 0.5; used
            // for the permutation control and the collective commutator
            const double b = 0.5;
            const GridSpec spec(2, 256, -12.0 * scale, 12.0 * scale);
            const auto s = from_function(spec, [b, h](std::span<const double> x) {
                return cplx(
                    std::exp(-(0.5 * (x[0] * x[0] + x[1] * x[1]) + b * x[0] * x[1]) / h), 0.0);
            });
            const std::string state = "grid_correlated_gaussian(a=1,b=0.5)";
            // closed-form moments: cov_q = [[2/3,-1/3],[-1/3,2/3]] hbar,
            // cov_p = [[1/2,1/4],[1/4,1/2]] hbar
            MomentTable ref;
            ref.n = 2;
            ref.mean_q = Eigen::VectorXd::Zero(2);
            ref.mean_p = Eigen::VectorXd::Zero(2);
            ref.cov_q = (Eigen::MatrixXd(2, 2) << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0)
                            .finished() * h;
            ref.cov_p = (Eigen::MatrixXd(2, 2) << 0.5, 0.25, 0.25, 0.5).finished() * h;
            add_grid_state_rows(col, s, grid_cfg, state, ref, cross_tol_2, residual_tol);

            const auto perm = permutation_commutation_check(s, consts);
            const double control = perm.min_control();
            col.add_check("check:permutation_control", 2, "grid", control, 0.1, control > 0.1,
                          state);
        });
        col.guarded("grid", "grid_" + triple_descriptor(0.4), [&] {
            const GridSpec spec(3, 64, -9.0 * scale, 9.0 * scale);
            const double r = 0.4;
            const double ep = std::exp(2.0 * r);
            const auto s = from_function(spec, [ep, h](std::span<const double> x) {
                const double w = (x[0] + x[1] + x[2]) / std::sqrt(3.0);
                const double norm2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                // collective mode squeezed toward small w, orthogonal modes vacuum
                return cplx(std::exp(-(norm2 + (ep - 1.0) * w * w) / (2.0 * h)), 0.0);
            });
            add_grid_state_rows(col, s, grid_cfg, "grid_" + triple_descriptor(r),
                                moments(make_correlated_triple(r, consts)), cross_tol_3,
                                residual_tol);
        });
    }

    std::stable_sort(col.rows.begin(), col.rows.end(), [](const OutputRow& a, const OutputRow& b) {
        if (a.name != b.name) return a.name < b.name;
        return a.state_descriptor < b.state_descriptor;
    });

    BatteryOutcome out;
    out.rows = std::move(col.rows);
    for (const auto& row : out.rows) {
        if (!row.holds) {
            out.all_pass = false;
            out.first_failure = row.name + " @ " + row.state_descriptor;
            break;
        }
    }
    return out;
}

} // namespace gur
