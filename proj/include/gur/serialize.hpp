#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gur/report.hpp"
#include "gur/searcher.hpp"

namespace gur {

/// One line of a verification stream: either an inequality report or an
/// engine self-check (cross-engine agreement, permutation residuals,
/// collective-variance consistency). Check rows carry a "check:" prefix in
/// the name column; report rows carry one of the enumerated relation
/// names. Both share the same columns in every output format.
struct OutputRow {
    std::string name;
    int n = 0;
    std::string engine;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    std::map<std::string, double> sub_values;
    std::string state_descriptor;

    bool is_check() const { return name.rfind("check:", 0) == 0; }
};

OutputRow to_row(const InequalityReport& rep);

// ---- verification stream ----
std::string row_to_jsonl(const OutputRow& row);
OutputRow row_from_jsonl(const std::string& line);

std::string rows_csv_header();
std::string row_to_csv(const OutputRow& row);
std::vector<OutputRow> rows_from_csv(std::istream& is);

// ---- searcher output ----
std::string search_result_to_json(const SearchResult& r, const std::string& family,
                                  const std::string& objective);
/// Fields parsed back from a minimize output file.
struct ParsedSearchResult {
    std::string family;
    std::string objective;
    SearchResult result;
};
ParsedSearchResult search_result_from_json(const std::string& text);

// ---- sweep output ----
/// JSON-lines, one row object per parameter point.
std::string sweep_row_to_jsonl(const SweepRow& row);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Splits one CSV record honoring double-quote escaping.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace gur
