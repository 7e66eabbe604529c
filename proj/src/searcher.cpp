#include "gur/searcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gur/errors.hpp"
#include "gur/gaussian.hpp"
#include "gur/numfmt.hpp"
#include "gur/rng.hpp"

namespace gur {

const char* to_string(Family f) {
    switch (f) {
        case Family::two_mode_squeezed: return "two_mode_squeezed";
        case Family::correlated_triple: return "correlated_triple";
        case Family::random_gaussian: return "random_gaussian";
        case Family::grid_correlated_gaussian: return "grid_correlated_gaussian";
    }
    throw std::logic_error("to_string: unknown Family");
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::two_mode_squeezed, Family::correlated_triple,
                     Family::random_gaussian, Family::grid_correlated_gaussian})
        if (s == to_string(f)) return f;
    throw std::invalid_argument("unknown family '" + s + "'");
}

const char* to_string(Objective o) {
    switch (o) {
        case Objective::collective_product: return "collective_product";
        case Objective::sum_product_two: return "sum_product_two";
        case Objective::sum_product_three: return "sum_product_three";
        case Objective::individual_product: return "individual_product";
    }
    throw std::logic_error("to_string: unknown Objective");
}

Objective objective_from_string(const std::string& s) {
    for (Objective o : {Objective::collective_product, Objective::sum_product_two,
                        Objective::sum_product_three, Objective::individual_product})
        if (s == to_string(o)) return o;
    throw std::invalid_argument("unknown objective '" + s + "'");
}

namespace {

int family_particles(Family f, int n_modes) {
    switch (f) {
        case Family::two_mode_squeezed: return 2;
        case Family::correlated_triple: return 3;
        case Family::random_gaussian: return n_modes;
        case Family::grid_correlated_gaussian: return 2;
    }
    throw std::logic_error("family_particles: unknown Family");
}

int family_dim(Family f, int n) {
    switch (f) {
        case Family::two_mode_squeezed:
        case Family::correlated_triple: return 1;
        case Family::random_gaussian: return n + n * (n - 1) / 2;
        case Family::grid_correlated_gaussian: return 2;
    }
    throw std::logic_error("family_dim: unknown Family");
}

GaussianState build_random_family(std::span<const double> params, int n, double hbar) {
    Eigen::VectorXd diag(2 * n);
    for (int k = 0; k < n; ++k) {
        diag(k) = std::exp(-2.0 * params[k]);
        diag(n + k) = std::exp(2.0 * params[k]);
    }
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
    int idx = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double th = params[idx++];
            Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
            g(i, i) = std::cos(th);
            g(j, j) = std::cos(th);
            g(i, j) = -std::sin(th);
            g(j, i) = std::sin(th);
            rot = g * rot;
        }
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    k.topLeftCorner(n, n) = rot;
    k.bottomRightCorner(n, n) = rot;
    Eigen::MatrixXd sigma = (hbar / 2.0) * k * diag.asDiagonal() * k.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    return GaussianState(n, hbar, Eigen::VectorXd::Zero(2 * n), std::move(sigma));
}

GridState build_grid_family(double a, double b, const GridSpec& spec) {
    return from_function(spec, [a, b](std::span<const double> x) {
        return cplx(std::exp(-0.5 * a * (x[0] * x[0] + x[1] * x[1]) - b * x[0] * x[1]), 0.0);
    });
}

struct BuiltState {
    MomentTable table;
    std::string descriptor;
    bool grid_engine = false;
};

std::string describe(Family f, std::span<const double> params) {
    std::ostringstream os;
    os << to_string(f) << "(";
    const char* key[2] = {"a", "b"};
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) os << ",";
        if (f == Family::grid_correlated_gaussian)
            os << key[i] << "=";
        else if (params.size() == 1)
            os << "r=";
        else
            os << "p" << i + 1 << "=";
        os << format_double(params[i]);
    }
    os << ")";
    return os.str();
}

BuiltState build_state(Family f, std::span<const double> params, int n_modes, double hbar) {
    const Constants c{hbar};
    BuiltState out;
    out.descriptor = describe(f, params);
    switch (f) {
        case Family::two_mode_squeezed:
            out.table = moments(make_two_mode_squeezed(params[0], c));
            return out;
        case Family::correlated_triple:
            out.table = moments(make_correlated_triple(params[0], c));
            return out;
        case Family::random_gaussian:
            out.table = moments(build_random_family(params, n_modes, hbar));
            return out;
        case Family::grid_correlated_gaussian: {
            const GridSpec spec(2, 128, -12.0, 12.0);
            out.table = moments(build_grid_family(params[0], params[1], spec), c);
            out.grid_engine = true;
            return out;
        }
    }
    throw std::logic_error("build_state: unknown Family");
}

double objective_value(Objective o, const MomentTable& m) {
    switch (o) {
        case Objective::collective_product: {
            const auto d = collective_dispersions(m);
            return d.dq2 * d.dp2;
        }
        case Objective::sum_product_two:
            return (m.var_q(0) + m.var_q(1)) * (m.var_p(0) + m.var_p(1));
        case Objective::sum_product_three:
            return (m.var_q(0) + m.var_q(1) + m.var_q(2)) *
                   (m.var_p(0) + m.var_p(1) + m.var_p(2));
        case Objective::individual_product:
            return std::sqrt(m.var_q(0)) * std::sqrt(m.var_p(0));
    }
    throw std::logic_error("objective_value: unknown Objective");
}

} // namespace

SearchProblem make_problem(Family family, Objective objective, int n_modes,
                           const SuiteConfig& cfg) {
    const int n = family_particles(family, n_modes);
    if (objective == Objective::sum_product_two && n != 2)
        throw std::invalid_argument("make_problem: sum_product_two needs a 2-particle family");
    if (objective == Objective::sum_product_three && n != 3)
        throw std::invalid_argument("make_problem: sum_product_three needs a 3-particle family");
    if (objective == Objective::individual_product && family == Family::random_gaussian)
        throw std::invalid_argument(
            "make_problem: individual_product requires equal dispersions; "
            "use a permutation-symmetric family");

    SearchProblem p;
    p.family = family;
    p.objective = objective;
    p.n_modes = n;
    p.config = cfg;
    switch (family) {
        case Family::two_mode_squeezed:
        case Family::correlated_triple:
            p.box = {{-2.0, 2.0}};
            break;
        case Family::random_gaussian: {
            for (int k = 0; k < n; ++k) p.box.push_back({-1.5, 1.5});
            for (int k = 0; k < n * (n - 1) / 2; ++k) p.box.push_back({-M_PI, M_PI});
            break;
        }
        case Family::grid_correlated_gaussian:
            p.box = {{0.5, 2.0}, {-1.5, 1.5}};
            break;
    }
    return p;
}

double objective_bound(const SearchProblem& p) {
    const double h = p.config.hbar;
    const int n = family_particles(p.family, p.n_modes);
    switch (p.objective) {
        case Objective::collective_product: return std::pow(n * h / 2.0, 2);
        case Objective::sum_product_two: return h * h / 4.0;
        case Objective::sum_product_three: return 9.0 * h * h / 64.0;
        case Objective::individual_product: return n == 2 ? h / 4.0 : h / 8.0;
    }
    throw std::logic_error("objective_bound: unknown Objective");
}

double hur_reference(const SearchProblem& p) {
    const double h = p.config.hbar;
    const int n = family_particles(p.family, p.n_modes);
    switch (p.objective) {
        case Objective::collective_product: return std::pow(n * h / 2.0, 2);
        case Objective::sum_product_two: return h * h;
        case Objective::sum_product_three: return 9.0 * h * h / 4.0;
        case Objective::individual_product: return h / 2.0;
    }
    throw std::logic_error("hur_reference: unknown Objective");
}

double SearchResult::trace_value_range() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& t : trace) {
        if (!std::isfinite(t.value)) continue;
        lo = std::min(lo, t.value);
        hi = std::max(hi, t.value);
    }
    return hi >= lo ? hi - lo : 0.0;
}

namespace {

class BudgetedObjective {
public:
    BudgetedObjective(const SearchProblem& p, int budget, SearchResult& result)
        : p_(p), budget_(budget), result_(result) {}

    bool exhausted() const { return result_.evaluations >= budget_; }

    double operator()(const std::vector<double>& x) {
        TracePoint t;
        t.params = x;
        try {
            const auto built = build_state(p_.family, x, p_.n_modes, p_.config.hbar);
            t.value = objective_value(p_.objective, built.table);
            if (!std::isfinite(t.value)) {
                t.value = std::numeric_limits<double>::infinity();
                t.note = "non-finite objective value";
            }
        } catch (const std::exception& e) {
            t.value = std::numeric_limits<double>::infinity();
            t.note = e.what();
        }
        ++result_.evaluations;
        if (t.value < best_ ||
            (t.value == best_ && std::lexicographical_compare(
                                     x.begin(), x.end(), result_.best_params.begin(),
                                     result_.best_params.end()))) {
            best_ = t.value;
            result_.best_params = x;
            result_.best_value = t.value;
        }
        result_.trace.push_back(std::move(t));
        return result_.trace.back().value;
    }

private:
    const SearchProblem& p_;
    int budget_;
    SearchResult& result_;
    double best_ = std::numeric_limits<double>::infinity();
};

std::vector<double> clamp_into(const std::vector<double>& x,
                               const std::vector<ParamRange>& box) {
    std::vector<double> out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(out[i], box[i].lo, box[i].hi);
    return out;
}

// one Nelder-Mead descent, sharing the global evaluation budget
void nelder_mead(BudgetedObjective& f, const std::vector<ParamRange>& box,
                 const std::vector<double>& start, int max_evals) {
    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    const int d = static_cast<int>(box.size());
    const int local_cap = max_evals;
    int spent = 0;
    auto eval = [&](const std::vector<double>& x) { ++spent; return f(clamp_into(x, box)); };
    auto can = [&]() { return spent < local_cap && !f.exhausted(); };

    std::vector<std::vector<double>> vx(d + 1, start);
    std::vector<double> fv(d + 1);
    for (int i = 0; i < d; ++i) {
        double step = 0.15 * (box[i].hi - box[i].lo);
        if (start[i] + step > box[i].hi) step = -step;
        vx[i + 1][i] += step;
    }
    for (int i = 0; i <= d; ++i) {
        if (!can()) return;
        fv[i] = eval(vx[i]);
    }

    while (can()) {
        std::vector<int> ord(d + 1);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            if (fv[a] != fv[b]) return fv[a] < fv[b];
            return std::lexicographical_compare(vx[a].begin(), vx[a].end(), vx[b].begin(),
                                                vx[b].end());
        });
        const int best = ord[0], worst = ord[d], second = ord[d - 1];
        if (std::isfinite(fv[best]) &&
            std::abs(fv[worst] - fv[best]) <= 1e-13 * (1.0 + std::abs(fv[best])))
            return;

        std::vector<double> centroid(d, 0.0);
        for (int k = 0; k < d; ++k) {
            for (int i = 0; i <= d; ++i)
                if (i != worst) centroid[k] += vx[i][k];
            centroid[k] /= d;
        }
        auto blend = [&](double t) {
            std::vector<double> x(d);
            for (int k = 0; k < d; ++k) x[k] = centroid[k] + t * (centroid[k] - vx[worst][k]);
            return x;
        };

        const auto xr = blend(alpha);
        if (!can()) return;
        const double fr = eval(xr);
        if (fr < fv[best]) {
            const auto xe = blend(gamma);
            if (!can()) { vx[worst] = xr; fv[worst] = fr; continue; }
            const double fe = eval(xe);
            if (fe < fr) { vx[worst] = xe; fv[worst] = fe; }
            else { vx[worst] = xr; fv[worst] = fr; }
        } else if (fr < fv[second]) {
            vx[worst] = xr;
            fv[worst] = fr;
        } else {
            const auto xc = blend(-rho);
            if (!can()) return;
            const double fc = eval(xc);
            if (fc < fv[worst]) {
                vx[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (int k = 0; k < d; ++k)
                        vx[i][k] = vx[best][k] + sigma * (vx[i][k] - vx[best][k]);
                    if (!can()) return;
                    fv[i] = eval(vx[i]);
                }
            }
        }
    }
}

} // namespace

SearchResult minimize(const SearchProblem& problem, int budget, std::uint64_t seed) {
    if (budget < 10)
        throw precondition_error("minimize: budget must be at least 10 evaluations");
    if (problem.dim() < 1 || problem.dim() != family_dim(problem.family, problem.n_modes))
        throw std::invalid_argument("minimize: parameter box does not match the family");

    SearchResult result;
    result.bound = objective_bound(problem);
    result.hur_reference = hur_reference(problem);
    result.best_params.assign(problem.dim(), 0.0);
    result.best_value = std::numeric_limits<double>::infinity();

    const int d = problem.dim();
    const int starts = std::clamp(budget / (15 * (d + 1)), 1, 4);

    // all start points drawn up front so the restart schedule is fixed
    DetRng rng(seed);
    std::vector<std::vector<double>> start_points;
    std::vector<double> center(d);
    for (int k = 0; k < d; ++k) center[k] = 0.5 * (problem.box[k].lo + problem.box[k].hi);
    start_points.push_back(center);
    for (int s = 1; s < starts; ++s) {
        std::vector<double> x(d);
        for (int k = 0; k < d; ++k) x[k] = rng.uniform(problem.box[k].lo, problem.box[k].hi);
        start_points.push_back(std::move(x));
    }

    BudgetedObjective f(problem, budget, result);
    const int per_start = budget / starts;
    for (const auto& s : start_points) {
        if (f.exhausted()) break;
        nelder_mead(f, problem.box, s, per_start);
    }
    // spend any remainder polishing from the best point found
    if (!f.exhausted() && result.best_value < std::numeric_limits<double>::infinity())
        nelder_mead(f, problem.box, result.best_params, budget);

    return result;
}

std::vector<std::pair<std::string, Relation>> sweep_slots(Family family) {
    std::vector<std::pair<std::string, Relation>> slots;
    slots.emplace_back("robertson", Relation::robertson);
    slots.emplace_back("collective_gur", Relation::collective_gur);
    slots.emplace_back("gur_n", Relation::gur_n);
    slots.emplace_back("gur_two", Relation::gur_two);
    slots.emplace_back("schwarz_q_two", Relation::schwarz_q_two);
    slots.emplace_back("schwarz_p_two", Relation::schwarz_p_two);
    slots.emplace_back("gur_two_bound", Relation::gur_two_bound);
    slots.emplace_back("symmetric_two", Relation::symmetric_two);
    for (const char* which : {"q", "p"}) {
        for (int bits = 0; bits < 8; ++bits) {
            std::string signs;
            signs += bits & 1 ? '-' : '+';
            signs += bits & 2 ? '-' : '+';
            signs += bits & 4 ? '-' : '+';
            slots.emplace_back(std::string("schwarz_three_") + which + "(" + signs + ")",
                               which[0] == 'q' ? Relation::schwarz_three_q
                                               : Relation::schwarz_three_p);
        }
        slots.emplace_back(std::string("schwarz_three_") + which + "(two_sided)",
                           which[0] == 'q' ? Relation::schwarz_three_q
                                           : Relation::schwarz_three_p);
    }
    slots.emplace_back("gur_three_bound", Relation::gur_three_bound);
    slots.emplace_back("symmetric_three", Relation::symmetric_three);
    (void)family;
    return slots;
}

std::vector<SweepRow> sweep(Family family, const std::vector<std::vector<double>>& param_grid,
                            const SuiteConfig& cfg) {
    if (param_grid.empty())
        throw std::invalid_argument("sweep: parameter grid must be non-empty");

    std::vector<SweepRow> rows;
    for (const auto& params : param_grid) {
        int n_modes = 2;
        if (family == Family::random_gaussian) {
            // dim = n + n(n-1)/2: 3 params mean n=2, 6 mean n=3
            if (params.size() == 3) n_modes = 2;
            else if (params.size() == 6) n_modes = 3;
            else throw std::invalid_argument("sweep: random_gaussian point must have 3 or 6 parameters");
        }
        if (static_cast<int>(params.size()) != family_dim(family, n_modes))
            throw std::invalid_argument("sweep: parameter point does not match the family");

        const auto built = build_state(family, params, n_modes, cfg.hbar);
        const MomentTable& m = built.table;

        SweepRow row;
        row.params = params;
        row.state_descriptor = built.descriptor;
        const std::string engine = built.grid_engine ? "grid" : "gaussian";

        auto add = [&](const std::string& label, Relation name, bool applicable,
                       InequalityReport rep = {}) {
            rep.engine = applicable ? engine : "";
            rep.state_descriptor = applicable ? built.descriptor : "";
            row.entries.push_back({label, name, applicable, std::move(rep)});
        };

        // robertson needs operator application; only the grid family has one
        if (built.grid_engine) {
            const GridSpec spec(2, 128, -12.0, 12.0);
            const auto s = build_grid_family(params[0], params[1], spec);
            auto rep = robertson(s, GridOperator::collective_position(2),
                                 GridOperator::collective_momentum(2), cfg);
            add("robertson", Relation::robertson, true, std::move(rep));
        } else {
            add("robertson", Relation::robertson, false);
        }

        add("collective_gur", Relation::collective_gur, true, collective_gur(m, cfg));
        add("gur_n", Relation::gur_n, true, gur_split(m, cfg));
        if (m.n == 2) {
            add("gur_two", Relation::gur_two, true, gur_pair(m, cfg));
            add("schwarz_q_two", Relation::schwarz_q_two, true,
                schwarz_pair_bound(m, Quadrature::Q, cfg));
            add("schwarz_p_two", Relation::schwarz_p_two, true,
                schwarz_pair_bound(m, Quadrature::P, cfg));
            add("gur_two_bound", Relation::gur_two_bound, true, gur_two_bound(m, cfg));
            try {
                auto rep = symmetric_product_bound(m, cfg);
                add("symmetric_two", Relation::symmetric_two, true, std::move(rep));
            } catch (const precondition_error&) {
                add("symmetric_two", Relation::symmetric_two, false);
            }
        } else {
            add("gur_two", Relation::gur_two, false);
            add("schwarz_q_two", Relation::schwarz_q_two, false);
            add("schwarz_p_two", Relation::schwarz_p_two, false);
            add("gur_two_bound", Relation::gur_two_bound, false);
            add("symmetric_two", Relation::symmetric_two, false);
        }
        if (m.n == 3) {
            for (Quadrature which : {Quadrature::Q, Quadrature::P}) {
                auto reps = schwarz_triple_bounds(m, which, cfg);
                const char* w = which == Quadrature::Q ? "q" : "p";
                for (std::size_t k = 0; k < reps.size(); ++k) {
                    std::string label = std::string("schwarz_three_") + w;
                    if (k < 8) {
                        std::string signs;
                        signs += k & 1 ? '-' : '+';
                        signs += k & 2 ? '-' : '+';
                        signs += k & 4 ? '-' : '+';
                        label += "(" + signs + ")";
                    } else {
                        label += "(two_sided)";
                    }
                    add(label, reps[k].name, true, std::move(reps[k]));
                }
            }
            add("gur_three_bound", Relation::gur_three_bound, true, gur_three_bound(m, cfg));
            try {
                auto rep = symmetric_product_bound(m, cfg);
                add("symmetric_three", Relation::symmetric_three, true, std::move(rep));
            } catch (const precondition_error&) {
                add("symmetric_three", Relation::symmetric_three, false);
            }
        } else {
            for (const char* w : {"q", "p"}) {
                for (int bits = 0; bits < 8; ++bits) {
                    std::string signs;
                    signs += bits & 1 ? '-' : '+';
                    signs += bits & 2 ? '-' : '+';
                    signs += bits & 4 ? '-' : '+';
                    add(std::string("schwarz_three_") + w + "(" + signs + ")",
                        w[0] == 'q' ? Relation::schwarz_three_q : Relation::schwarz_three_p,
                        false);
                }
                add(std::string("schwarz_three_") + w + "(two_sided)",
                    w[0] == 'q' ? Relation::schwarz_three_q : Relation::schwarz_three_p,
                    false);
            }
            add("gur_three_bound", Relation::gur_three_bound, false);
            add("symmetric_three", Relation::symmetric_three, false);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace gur
