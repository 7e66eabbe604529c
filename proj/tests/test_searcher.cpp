#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "gur/errors.hpp"
#include "gur/searcher.hpp"

using namespace gur;

TEST_CASE("problem construction validates family and objective") {
    CHECK_NOTHROW(make_problem(Family::two_mode_squeezed, Objective::collective_product));
    CHECK_NOTHROW(make_problem(Family::correlated_triple, Objective::sum_product_three));
    CHECK_THROWS_AS(make_problem(Family::two_mode_squeezed, Objective::sum_product_three),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_problem(Family::correlated_triple, Objective::sum_product_two),
                    std::invalid_argument);
    // the equal-dispersion objective needs a permutation-symmetric family
    CHECK_THROWS_AS(make_problem(Family::random_gaussian, Objective::individual_product),
                    std::invalid_argument);
}

TEST_CASE("bounds and reference values per objective") {
    const auto p2 = make_problem(Family::two_mode_squeezed, Objective::individual_product);
    CHECK(objective_bound(p2) == 0.25);
    CHECK(hur_reference(p2) == 0.5);
    const auto p3 = make_problem(Family::correlated_triple, Objective::individual_product);
    CHECK(objective_bound(p3) == 0.125);
    const auto c2 = make_problem(Family::two_mode_squeezed, Objective::collective_product);
    CHECK(objective_bound(c2) == 1.0);
    const auto s3 = make_problem(Family::correlated_triple, Objective::sum_product_three);
    CHECK(objective_bound(s3) == Catch::Approx(9.0 / 64.0).epsilon(1e-15));
    CHECK(hur_reference(s3) == Catch::Approx(9.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("collective objective is flat on the squeezed family") {
    const auto p = make_problem(Family::two_mode_squeezed, Objective::collective_product);
    const auto res = minimize(p, 120, 1);
    CHECK(res.best_value == Catch::Approx(1.0).margin(1e-9));
    CHECK(res.trace_value_range() < 1e-9);
}

TEST_CASE("individual product bottoms out at zero squeezing") {
    const auto p = make_problem(Family::two_mode_squeezed, Objective::individual_product);
    const auto res = minimize(p, 200, 1);
    CHECK(res.best_value == Catch::Approx(0.5).margin(1e-6));
    CHECK(std::abs(res.best_params.at(0)) < 1e-3);
    CHECK(res.bound == 0.25);
    CHECK(res.hur_reference == 0.5);
    CHECK(res.best_value >= res.bound - p.config.tol);
}

TEST_CASE("budget contract") {
    const auto p = make_problem(Family::two_mode_squeezed, Objective::individual_product);
    const auto res = minimize(p, 10, 3);
    CHECK(res.evaluations <= 10);
    CHECK(res.evaluations >= 1);
    CHECK(res.best_value >= res.bound - p.config.tol);
    CHECK_THROWS_AS(minimize(p, 9, 3), precondition_error);
}

TEST_CASE("identical inputs give identical results") {
    const auto p = make_problem(Family::random_gaussian, Objective::sum_product_two, 2);
    const auto a = minimize(p, 150, 42);
    const auto b = minimize(p, 150, 42);
    REQUIRE(a.evaluations == b.evaluations);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.best_value == b.best_value);
    CHECK(a.best_params == b.best_params);
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].params == b.trace[k].params);
        CHECK(a.trace[k].value == b.trace[k].value);
    }
    // a different seed explores different restart points
    const auto c = minimize(p, 150, 43);
    bool same_trace = c.trace.size() == a.trace.size();
    for (std::size_t k = 0; same_trace && k < a.trace.size(); ++k)
        same_trace = c.trace[k].params == a.trace[k].params;
    CHECK_FALSE(same_trace);
}

TEST_CASE("running minimum over the trace never increases") {
    const auto p = make_problem(Family::correlated_triple, Objective::individual_product);
    const auto res = minimize(p, 80, 5);
    double running = std::numeric_limits<double>::infinity();
    for (const auto& t : res.trace) {
        const double next = std::min(running, t.value);
        CHECK(next <= running);
        running = next;
    }
    CHECK(running == res.best_value);
}

TEST_CASE("engine rejections score infinity and keep their diagnostic") {
    // the grid family boxes in a region where a - |b| <= 0 makes the sample
    // non-normalizable; those points must be recorded, not fatal
    auto p = make_problem(Family::grid_correlated_gaussian, Objective::individual_product,
                          2, SuiteConfig::grid_defaults());
    p.box = {{0.5, 0.6}, {1.2, 1.4}}; // forces a < b everywhere
    const auto res = minimize(p, 12, 1);
    CHECK(res.evaluations <= 12);
    bool saw_rejection = false;
    for (const auto& t : res.trace) {
        if (std::isinf(t.value)) {
            saw_rejection = true;
            CHECK_FALSE(t.note.empty());
        }
    }
    CHECK(saw_rejection);
    CHECK(std::isinf(res.best_value)); // nothing feasible in this box
}

TEST_CASE("grid family minimization stays above the bound") {
    const auto p = make_problem(Family::grid_correlated_gaussian,
                                Objective::individual_product, 2,
                                SuiteConfig::grid_defaults());
    const auto res = minimize(p, 60, 7);
    CHECK(std::isfinite(res.best_value));
    CHECK(res.best_value >= res.bound - p.config.tol);
    // uncorrelated minimum of the family is the vacuum value hbar/2
    CHECK(res.best_value <= 0.5 + 1e-3);
}

TEST_CASE("sweep walks the squeezed family") {
    std::vector<std::vector<double>> grid;
    for (double r : {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) grid.push_back({r});
    const auto rows = sweep(Family::two_mode_squeezed, grid);
    REQUIRE(rows.size() == 9);
    for (const auto& row : rows) {
        bool found = false;
        for (const auto& e : row.entries) {
            if (e.label == "gur_two_bound") {
                REQUIRE(e.applicable);
                CHECK(e.report.holds);
                found = true;
            }
            // three-particle relations are present but marked inapplicable
            if (e.label == "gur_three_bound") CHECK_FALSE(e.applicable);
        }
        CHECK(found);
    }
    // covariance grows monotonically with r
    double prev = -1.0;
    for (const auto& row : rows) {
        for (const auto& e : row.entries) {
            if (e.label != "schwarz_q_two") continue;
            const double qcf = e.report.sub_values.at("qcf");
            CHECK(qcf > prev);
            prev = qcf;
        }
    }
}

TEST_CASE("sweep walks the correlated triple") {
    std::vector<std::vector<double>> grid;
    for (double r : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) grid.push_back({r});
    const auto rows = sweep(Family::correlated_triple, grid);
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        int held = 0;
        for (const auto& e : row.entries) {
            if (!e.applicable) continue;
            CHECK(e.report.holds);
            ++held;
        }
        CHECK(held >= 21); // collective, split, 2x9 sign bounds, sum bound, symmetric
    }
}

TEST_CASE("single-point sweep equals the product vacuum reports") {
    const auto rows = sweep(Family::two_mode_squeezed, {{0.0}});
    REQUIRE(rows.size() == 1);
    for (const auto& e : rows[0].entries) {
        if (e.label == "collective_gur") {
            CHECK(e.report.lhs == Catch::Approx(1.0).epsilon(1e-14));
            CHECK(e.report.slack == Catch::Approx(0.0).margin(1e-12));
        }
        if (e.label == "symmetric_two")
            CHECK(e.report.lhs == Catch::Approx(0.5).epsilon(1e-14));
    }
    CHECK_THROWS_AS(sweep(Family::two_mode_squeezed, {}), std::invalid_argument);
}

TEST_CASE("sweep slots enumerate every relation exactly once per row") {
    const auto slots = sweep_slots(Family::two_mode_squeezed);
    const auto rows = sweep(Family::two_mode_squeezed, {{0.3}});
    REQUIRE(rows[0].entries.size() == slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
        CHECK(rows[0].entries[k].label == slots[k].first);
        CHECK(rows[0].entries[k].name == slots[k].second);
    }
}
