#pragma once

#include <map>
#include <string>

namespace gur {

/// Identifiers of the uncertainty relations the suite can evaluate.
enum class Relation {
    robertson,
    collective_gur,
    gur_n,
    gur_two,
    schwarz_q_two,
    schwarz_p_two,
    gur_two_bound,
    symmetric_two,
    schwarz_three_q,
    schwarz_three_p,
    gur_three_bound,
    symmetric_three,
};

const char* to_string(Relation r);
Relation relation_from_string(const std::string& s);

/// One evaluated relation. slack = lhs - rhs; holds <=> slack >= -tol
/// under the tolerance the report was evaluated with. sub_values carries
/// named intermediate quantities (bracketed factors, QCF sums, reference
/// bounds) for the output tables; engine and state_descriptor are stamped
/// by the driver that owns the state.
struct InequalityReport {
    Relation name = Relation::robertson;
    int n = 0;
    std::string engine;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    std::map<std::string, double> sub_values;
    std::string state_descriptor;
};

/// Builds a report from lhs/rhs, deriving slack and the verdict.
InequalityReport make_report(Relation name, int n, double lhs, double rhs, double tol,
                             std::map<std::string, double> sub_values = {});

} // namespace gur
