#include "gur/report.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace gur {

namespace {

constexpr std::array<std::pair<Relation, const char*>, 12> kNames = {{
    {Relation::robertson, "robertson"},
    {Relation::collective_gur, "collective_gur"},
    {Relation::gur_n, "gur_n"},
    {Relation::gur_two, "gur_two"},
    {Relation::schwarz_q_two, "schwarz_q_two"},
    {Relation::schwarz_p_two, "schwarz_p_two"},
    {Relation::gur_two_bound, "gur_two_bound"},
    {Relation::symmetric_two, "symmetric_two"},
    {Relation::schwarz_three_q, "schwarz_three_q"},
    {Relation::schwarz_three_p, "schwarz_three_p"},
    {Relation::gur_three_bound, "gur_three_bound"},
    {Relation::symmetric_three, "symmetric_three"},
}};

} // namespace

const char* to_string(Relation r) {
    for (const auto& [rel, name] : kNames)
        if (rel == r) return name;
    throw std::logic_error("to_string: unknown Relation");
}

Relation relation_from_string(const std::string& s) {
    for (const auto& [rel, name] : kNames)
        if (s == name) return rel;
    throw std::invalid_argument("relation_from_string: unknown relation '" + s + "'");
}

InequalityReport make_report(Relation name, int n, double lhs, double rhs, double tol,
                             std::map<std::string, double> sub_values) {
    InequalityReport rep;
    rep.name = name;
    rep.n = n;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.slack = lhs - rhs;
    rep.holds = rep.slack >= -tol;
    rep.sub_values = std::move(sub_values);
    return rep;
}

} // namespace gur
