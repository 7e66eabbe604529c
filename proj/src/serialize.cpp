#include "gur/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "gur/numfmt.hpp"

namespace gur {

namespace {

using nlohmann::json;

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{})
        throw std::runtime_error("could not parse number '" + s + "'");
    return v;
}

json sub_values_json(const std::map<std::string, double>& subs) {
    json j = json::object();
    for (const auto& [k, v] : subs) j[k] = v;
    return j;
}

// +/-inf is not representable in JSON; the trace of rejected searcher
// points uses null for +inf.
json finite_or_null(double v) {
    if (std::isfinite(v)) return json(v);
    return json(nullptr);
}

double from_finite_or_null(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

} // namespace

OutputRow to_row(const InequalityReport& rep) {
    OutputRow row;
    row.name = to_string(rep.name);
    row.n = rep.n;
    row.engine = rep.engine;
    row.lhs = rep.lhs;
    row.rhs = rep.rhs;
    row.slack = rep.slack;
    row.holds = rep.holds;
    row.sub_values = rep.sub_values;
    row.state_descriptor = rep.state_descriptor;
    return row;
}

std::string row_to_jsonl(const OutputRow& row) {
    json j;
    j["name"] = row.name;
    j["n"] = row.n;
    j["engine"] = row.engine;
    j["lhs"] = row.lhs;
    j["rhs"] = row.rhs;
    j["slack"] = row.slack;
    j["holds"] = row.holds;
    j["sub_values"] = sub_values_json(row.sub_values);
    j["state_descriptor"] = row.state_descriptor;
    return j.dump();
}

OutputRow row_from_jsonl(const std::string& line) {
    const json j = json::parse(line);
    OutputRow row;
    row.name = j.at("name").get<std::string>();
    row.n = j.at("n").get<int>();
    row.engine = j.at("engine").get<std::string>();
    row.lhs = j.at("lhs").get<double>();
    row.rhs = j.at("rhs").get<double>();
    row.slack = j.at("slack").get<double>();
    row.holds = j.at("holds").get<bool>();
    for (const auto& [k, v] : j.at("sub_values").items())
        row.sub_values[k] = v.get<double>();
    row.state_descriptor = j.at("state_descriptor").get<std::string>();
    return row;
}

std::string rows_csv_header() {
    return "name,n,engine,lhs,rhs,slack,holds,sub_values,state_descriptor";
}

std::string row_to_csv(const OutputRow& row) {
    std::ostringstream os;
    os << csv_quote(row.name) << ',' << row.n << ',' << csv_quote(row.engine) << ','
       << format_double(row.lhs) << ',' << format_double(row.rhs) << ','
       << format_double(row.slack) << ',' << (row.holds ? "true" : "false") << ','
       << csv_quote(sub_values_json(row.sub_values).dump()) << ','
       << csv_quote(row.state_descriptor);
    return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<OutputRow> rows_from_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("rows_from_csv: empty input");
    if (line != rows_csv_header())
        throw std::runtime_error("rows_from_csv: unexpected header '" + line + "'");
    std::vector<OutputRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9)
            throw std::runtime_error("rows_from_csv: malformed record '" + line + "'");
        OutputRow row;
        row.name = f[0];
        row.n = static_cast<int>(parse_double(f[1]));
        row.engine = f[2];
        row.lhs = parse_double(f[3]);
        row.rhs = parse_double(f[4]);
        row.slack = parse_double(f[5]);
        row.holds = f[6] == "true";
        const json subs = json::parse(f[7]);
        for (const auto& [k, v] : subs.items())
            row.sub_values[k] = v.get<double>();
        row.state_descriptor = f[8];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string search_result_to_json(const SearchResult& r, const std::string& family,
                                  const std::string& objective) {
    json j;
    j["command"] = "minimize";
    j["family"] = family;
    j["objective"] = objective;
    j["best_params"] = r.best_params;
    j["best_value"] = finite_or_null(r.best_value);
    j["bound"] = r.bound;
    j["hur_reference"] = r.hur_reference;
    j["evaluations"] = r.evaluations;
    json trace = json::array();
    for (const auto& t : r.trace) {
        json tp;
        tp["params"] = t.params;
        tp["value"] = finite_or_null(t.value);
        if (!t.note.empty()) tp["note"] = t.note;
        trace.push_back(std::move(tp));
    }
    j["trace"] = std::move(trace);
    return j.dump();
}

ParsedSearchResult search_result_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("command") || j.at("command") != "minimize")
        throw std::runtime_error("search_result_from_json: not a minimize output");
    ParsedSearchResult out;
    out.family = j.at("family").get<std::string>();
    out.objective = j.at("objective").get<std::string>();
    out.result.best_params = j.at("best_params").get<std::vector<double>>();
    out.result.best_value = from_finite_or_null(j.at("best_value"));
    out.result.bound = j.at("bound").get<double>();
    out.result.hur_reference = j.at("hur_reference").get<double>();
    out.result.evaluations = j.at("evaluations").get<int>();
    for (const auto& tp : j.at("trace")) {
        TracePoint t;
        t.params = tp.at("params").get<std::vector<double>>();
        t.value = from_finite_or_null(tp.at("value"));
        if (tp.contains("note")) t.note = tp.at("note").get<std::string>();
        out.result.trace.push_back(std::move(t));
    }
    return out;
}

std::string sweep_row_to_jsonl(const SweepRow& row) {
    json j;
    j["command"] = "sweep";
    j["params"] = row.params;
    j["state_descriptor"] = row.state_descriptor;
    json entries = json::array();
    for (const auto& e : row.entries) {
        json je;
        je["label"] = e.label;
        je["name"] = to_string(e.name);
        je["applicable"] = e.applicable;
        if (e.applicable) {
            je["lhs"] = e.report.lhs;
            je["rhs"] = e.report.rhs;
            je["slack"] = e.report.slack;
            je["holds"] = e.report.holds;
            je["sub_values"] = sub_values_json(e.report.sub_values);
        }
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j.dump();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("sweep_to_csv: no rows");
    std::ostringstream os;

    // header from the first row; every row of a sweep shares its slots
    const SweepRow& head = rows.front();
    for (std::size_t i = 0; i < head.params.size(); ++i) {
        if (i > 0) os << ',';
        os << "param_" << i + 1;
    }
    os << ",state_descriptor";
    for (const auto& e : head.entries) {
        os << ',' << csv_quote(e.label + ".applicable");
        if (!e.applicable) continue;
        os << ',' << csv_quote(e.label + ".lhs") << ',' << csv_quote(e.label + ".rhs") << ','
           << csv_quote(e.label + ".slack") << ',' << csv_quote(e.label + ".holds");
        for (const auto& [k, v] : e.report.sub_values) os << ',' << csv_quote(e.label + "." + k);
    }
    os << '\n';

    for (const auto& row : rows) {
        if (row.entries.size() != head.entries.size())
            throw std::invalid_argument("sweep_to_csv: inhomogeneous rows");
        for (std::size_t i = 0; i < row.params.size(); ++i) {
            if (i > 0) os << ',';
            os << format_double(row.params[i]);
        }
        os << ',' << csv_quote(row.state_descriptor);
        for (std::size_t k = 0; k < row.entries.size(); ++k) {
            const auto& e = row.entries[k];
            os << ',' << (e.applicable ? "true" : "false");
            if (!head.entries[k].applicable) continue;
            os << ',' << format_double(e.report.lhs) << ',' << format_double(e.report.rhs)
               << ',' << format_double(e.report.slack) << ','
               << (e.report.holds ? "true" : "false");
            for (const auto& [key, v] : e.report.sub_values) os << ',' << format_double(v);
        }
        os << '\n';
    }
    return os.str();
}

} // namespace gur
