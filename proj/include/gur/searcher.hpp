#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gur/constants.hpp"
#include "gur/inequalities.hpp"
#include "gur/report.hpp"

namespace gur {

/// Parameterized state families the searcher can walk.
///   two_mode_squeezed        r                       (1 parameter)
///   correlated_triple        r                       (1 parameter)
///   random_gaussian          r_1..r_n, Givens angles (n + n(n-1)/2 parameters)
///   grid_correlated_gaussian a, b with
///                            psi ~ exp(-a(x1^2+x2^2)/2 - b x1 x2)
enum class Family {
    two_mode_squeezed,
    correlated_triple,
    random_gaussian,
    grid_correlated_gaussian,
};

const char* to_string(Family f);
Family family_from_string(const std::string& s);

/// Objectives: left sides of the collective relation, the two- and
/// three-particle variance-sum bounds, and the equal-dispersion
/// single-particle product.
enum class Objective {
    collective_product,
    sum_product_two,
    sum_product_three,
    individual_product,
};

const char* to_string(Objective o);
Objective objective_from_string(const std::string& s);

struct ParamRange {
    double lo;
    double hi;
};

struct SearchProblem {
    Family family = Family::two_mode_squeezed;
    Objective objective = Objective::individual_product;
    std::vector<ParamRange> box;
    int n_modes = 2;      // random_gaussian only
    SuiteConfig config;   // hbar and slack tolerance for the bound check

    int dim() const { return static_cast<int>(box.size()); }
};

/// Problem with the family's default parameter box. Throws when the
/// objective does not fit the family (particle count, or the
/// equal-dispersion constraint of individual_product, which is enforced
/// by restricting to permutation-symmetric families).
SearchProblem make_problem(Family family, Objective objective, int n_modes = 2,
                           const SuiteConfig& cfg = SuiteConfig::gaussian_defaults());

/// The relation's right side for this objective, and the conventional
/// uncorrelated-particles reference value shown beside it.
double objective_bound(const SearchProblem& p);
double hur_reference(const SearchProblem& p);

struct TracePoint {
    std::vector<double> params;
    double value;
    std::string note; // diagnostic when the engine rejected the point
};

struct SearchResult {
    std::vector<double> best_params;
    double best_value = 0.0;
    double bound = 0.0;
    double hur_reference = 0.0;
    int evaluations = 0;
    std::vector<TracePoint> trace;

    /// Spread of the finite objective values seen; tiny spread means the
    /// objective is flat over the family.
    double trace_value_range() const;
};

/// Derivative-free minimization: Nelder-Mead simplex descent restarted
/// from a seeded multistart set over the parameter box. Deterministic for
/// fixed (problem, budget, seed); every objective evaluation lands in the
/// trace; engine rejections score +infinity and carry their diagnostic.
SearchResult minimize(const SearchProblem& problem, int budget, std::uint64_t seed);

/// One evaluated relation within a sweep row. label disambiguates
/// relations that produce several reports per state (the sign-vector
/// bounds). applicable = false marks relations skipped for this family.
struct SweepEntry {
    std::string label;
    Relation name = Relation::robertson;
    bool applicable = false;
    InequalityReport report;
};

struct SweepRow {
    std::vector<double> params;
    std::string state_descriptor;
    std::vector<SweepEntry> entries;
};

/// Evaluates the full relation suite at every grid point of the family's
/// parameter space. Inapplicable relations appear in every row, marked.
std::vector<SweepRow> sweep(Family family, const std::vector<std::vector<double>>& param_grid,
                            const SuiteConfig& cfg = SuiteConfig::gaussian_defaults());

/// The fixed set of (label, relation) slots a sweep row reports, given the
/// family. Shared by the sweep driver and the CSV writer.
std::vector<std::pair<std::string, Relation>> sweep_slots(Family family);

} // namespace gur
