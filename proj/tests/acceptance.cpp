// Acceptance suite: one pass/fail line per criterion, timed. Exits nonzero
// if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gur/battery.hpp"
#include "gur/gaussian.hpp"
#include "gur/grid.hpp"
#include "gur/inequalities.hpp"
#include "gur/operators.hpp"
#include "gur/searcher.hpp"
#include "oracles.hpp"

using namespace gur;

namespace {

struct Harness {
    int failures = 0;

    void criterion(int number, const std::string& title, double time_limit_s,
                   const std::function<void(std::vector<std::string>&)>& body) {
        std::vector<std::string> problems;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(problems);
        } catch (const std::exception& e) {
            problems.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed >= time_limit_s) {
            std::ostringstream os;
            os << "runtime " << elapsed << "s exceeds the " << time_limit_s << "s limit";
            problems.push_back(os.str());
        }
        if (problems.empty()) {
            std::printf("PASS criterion %2d: %s (%.2fs)\n", number, title.c_str(), elapsed);
        } else {
            ++failures;
            std::printf("FAIL criterion %2d: %s (%.2fs)\n", number, title.c_str(), elapsed);
            for (const auto& p : problems) std::printf("      - %s\n", p.c_str());
        }
        std::fflush(stdout);
    }
};

void expect(std::vector<std::string>& problems, bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

GridState sample_tms(double r, int points, double extent) {
    return from_function(GridSpec(2, points, -extent, extent),
                         [r](std::span<const double> x) {
                             return cplx(oracle::tms_psi(x[0], x[1], r), 0.0);
                         });
}

GridState sample_correlated_b05(int points = 256, double extent = 12.0) {
    return from_function(GridSpec(2, points, -extent, extent),
                         [](std::span<const double> x) {
                             return cplx(oracle::corr_psi(x[0], x[1], 1.0, 0.5), 0.0);
                         });
}

int run_cli(const std::string& env_and_args) {
    const std::string cmd = env_and_args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

constexpr int kRandomCount = 1000;

} // namespace

int main() {
    Harness h;
    const SuiteConfig gauss = SuiteConfig::gaussian_defaults();
    const SuiteConfig grid_cfg = SuiteConfig::grid_defaults();

    h.criterion(1, "collective saturation on the squeezed family", 1.0, [&](auto& problems) {
        for (double r : {0.0, 0.25, 0.5, 1.0, 2.0}) {
            const auto d = collective_dispersions(moments(make_two_mode_squeezed(r)));
            const double product = d.dq2 * d.dp2;
            expect(problems, std::abs(product - 1.0) <= 1e-9,
                   "r=" + fmt(r) + ": collective product " + fmt(product) +
                       " deviates from hbar^2 by more than 1e-9 relative");
        }
    });

    h.criterion(2, "product vacua saturate the collective relation", 1.0, [&](auto& problems) {
        for (int n = 1; n <= 3; ++n) {
            const auto d = collective_dispersions(moments(make_product_vacuum(n)));
            const double rhs = n * n / 4.0;
            expect(problems, std::abs(d.dq2 * d.dp2 - rhs) <= 1e-12 * rhs,
                   "n=" + std::to_string(n) + ": relative error above 1e-12");
        }
    });

    h.criterion(3, "pair covariance bound: random battery and squeezed slack", 10.0,
                [&](auto& problems) {
                    for (int k = 0; k < kRandomCount; ++k) {
                        const auto m = moments(make_random_state(2, 1 + k, 1.0));
                        for (Quadrature w : {Quadrature::Q, Quadrature::P}) {
                            const auto rep = schwarz_pair_bound(m, w, gauss);
                            expect(problems, rep.slack >= -1e-9,
                                   "seed " + std::to_string(1 + k) + ": slack " +
                                       fmt(rep.slack));
                        }
                    }
                    for (double r : {0.0, 0.25, 0.5, 1.0, 2.0}) {
                        const auto rep = schwarz_pair_bound(
                            moments(make_two_mode_squeezed(r)), Quadrature::Q, gauss);
                        const double expected = 0.5 * std::exp(-2.0 * r);
                        expect(problems, std::abs(rep.slack - expected) <= 1e-9,
                               "r=" + fmt(r) + ": slack " + fmt(rep.slack) + " vs " +
                                   fmt(expected));
                    }
                });

    h.criterion(4, "pair and triple variance-sum bounds on the random batteries", 30.0,
                [&](auto& problems) {
                    for (int k = 0; k < kRandomCount; ++k) {
                        const auto m2 = moments(make_random_state(2, 1 + k, 1.0));
                        const auto r2 = gur_two_bound(m2, gauss);
                        expect(problems, r2.slack >= -1e-9,
                               "pair seed " + std::to_string(1 + k) + ": slack " +
                                   fmt(r2.slack));
                        const auto m3 = moments(make_random_state(3, 1 + k, 1.0));
                        const auto r3 = gur_three_bound(m3, gauss);
                        expect(problems, r3.slack >= -1e-9,
                               "triple seed " + std::to_string(1 + k) + ": slack " +
                                   fmt(r3.slack));
                    }
                });

    h.criterion(5, "three-particle sign-combination bounds on the random battery", 30.0,
                [&](auto& problems) {
                    for (int k = 0; k < kRandomCount; ++k) {
                        const auto m = moments(make_random_state(3, 1 + k, 1.0));
                        for (Quadrature w : {Quadrature::Q, Quadrature::P}) {
                            const auto reps = schwarz_triple_bounds(m, w, gauss);
                            if (reps.size() != 9) {
                                problems.push_back("expected 9 reports per quadrature");
                                return;
                            }
                            for (const auto& rep : reps)
                                expect(problems, rep.slack >= -1e-9,
                                       "seed " + std::to_string(1 + k) + ": slack " +
                                           fmt(rep.slack));
                        }
                    }
                });

    h.criterion(6, "grid and gaussian engines agree on the squeezed family", 30.0,
                [&](auto& problems) {
                    for (double r : {0.0, 0.5, 1.0}) {
                        const auto mg = moments(sample_tms(r, 256, 12.0));
                        const auto me = moments(make_two_mode_squeezed(r));
                        double worst = (mg.mean_q - me.mean_q).cwiseAbs().maxCoeff();
                        worst = std::max(worst, (mg.mean_p - me.mean_p).cwiseAbs().maxCoeff());
                        worst = std::max(worst, (mg.cov_q - me.cov_q).cwiseAbs().maxCoeff());
                        worst = std::max(worst, (mg.cov_p - me.cov_p).cwiseAbs().maxCoeff());
                        expect(problems, worst <= 1e-6,
                               "r=" + fmt(r) + ": entrywise deviation " + fmt(worst));
                    }
                });

    h.criterion(7, "collective observables commute with the swap; the control does not", 30.0,
                [&](auto& problems) {
                    const auto vac = from_function(GridSpec(2, 256, -12.0, 12.0),
                                                   [](std::span<const double> x) {
                                                       return cplx(
                                                           std::exp(-0.5 * (x[0] * x[0] +
                                                                            x[1] * x[1])),
                                                           0.0);
                                                   });
                    const auto corr = sample_correlated_b05();
                    for (const auto* s : {&vac, &corr}) {
                        const auto check = permutation_commutation_check(*s);
                        expect(problems, check.max_collective() <= 1e-8,
                               "collective residual " + fmt(check.max_collective()));
                    }
                    const auto control = permutation_commutation_check(corr).min_control();
                    expect(problems, control > 0.1,
                           "control residual " + fmt(control) + " not above 0.1");
                });

    h.criterion(8, "robertson saturation and the collective commutator", 30.0,
                [&](auto& problems) {
                    const auto vac = from_function(GridSpec(1, 256, -10.0, 10.0),
                                                   [](std::span<const double> x) {
                                                       return cplx(
                                                           std::exp(-0.5 * x[0] * x[0]), 0.0);
                                                   });
                    const auto rep = robertson(vac, GridOperator::position(1),
                                               GridOperator::momentum(1), grid_cfg);
                    expect(problems, std::abs(rep.slack) <= 1e-8,
                           "vacuum slack " + fmt(rep.slack));

                    const auto corr = sample_correlated_b05();
                    const auto coll = robertson(corr, GridOperator::collective_position(2),
                                                GridOperator::collective_momentum(2), grid_cfg);
                    const double comm = coll.sub_values.at("commutator_imag");
                    expect(problems, std::abs(comm - 2.0) <= 1e-6,
                           "collective commutator " + fmt(comm) + " vs 2*hbar");
                });

    h.criterion(9, "searcher finds the squeezed-family minimum at zero squeezing", 5.0,
                [&](auto& problems) {
                    const auto p = make_problem(Family::two_mode_squeezed,
                                                Objective::individual_product);
                    const auto res = minimize(p, 200, 1);
                    expect(problems, std::abs(res.best_value - 0.5) <= 1e-6,
                           "best value " + fmt(res.best_value) + " vs hbar/2");
                    expect(problems, std::abs(res.best_params.at(0)) <= 1e-3,
                           "optimum r = " + fmt(res.best_params.at(0)) + " not within 1e-3 of 0");
                    expect(problems, res.bound == 0.25, "bound not hbar/4");
                    expect(problems, res.hur_reference == 0.5, "reference not hbar/2");

                    // the report renders bound and reference side by side
                    const std::string out = "/tmp/gur_acceptance_minimize.json";
                    int code = run_cli(std::string(GUR_CLI_PATH) +
                                       " minimize --family two_mode_squeezed --objective "
                                       "individual_product --budget 200 --seed 1 --out " + out);
                    expect(problems, code == 0, "minimize exited " + std::to_string(code));
                    std::array<char, 4096> buf{};
                    std::string text;
                    FILE* pipe = popen((std::string(GUR_CLI_PATH) + " report " + out).c_str(),
                                       "r");
                    if (pipe == nullptr) {
                        problems.push_back("could not run report");
                        return;
                    }
                    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
                        text.append(buf.data(), got);
                    code = WEXITSTATUS(pclose(pipe));
                    expect(problems, code == 0, "report exited " + std::to_string(code));
                    bool side_by_side = false;
                    std::istringstream lines(text);
                    std::string line;
                    while (std::getline(lines, line))
                        if (line.find("0.25") != std::string::npos &&
                            line.find("0.5") != std::string::npos)
                            side_by_side = true;
                    expect(problems, side_by_side,
                           "report does not show bound and reference side by side:\n" + text);
                    std::remove(out.c_str());
                });

    h.criterion(10, "verify gate: clean battery passes, corrupted engines fail", 120.0,
                [&](auto& problems) {
                    const std::string cli = GUR_CLI_PATH;
                    const int clean = run_cli(cli + " verify");
                    expect(problems, clean == 0,
                           "clean verify exited " + std::to_string(clean));
                    const int gauss_mut = run_cli("GUR_MUTATE=gaussian_qcf_sign " + cli +
                                                  " verify --engine gaussian");
                    expect(problems, gauss_mut == 1,
                           "gaussian mutation exited " + std::to_string(gauss_mut));
                    const int grid_mut = run_cli("GUR_MUTATE=grid_qcf_sign " + cli +
                                                 " verify --engine grid");
                    expect(problems, grid_mut == 1,
                           "grid mutation exited " + std::to_string(grid_mut));
                });

    if (h.failures == 0) {
        std::printf("all acceptance criteria pass\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", h.failures);
    return 1;
}
