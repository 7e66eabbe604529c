#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gur/battery.hpp"
#include "gur/gaussian.hpp"
#include "gur/inequalities.hpp"
#include "gur/numfmt.hpp"
#include "gur/serialize.hpp"

using namespace gur;

namespace {

bool rows_equal(const OutputRow& a, const OutputRow& b) {
    // bit-level comparison of every number
    auto same = [](double x, double y) {
        return std::memcmp(&x, &y, sizeof(double)) == 0;
    };
    if (a.name != b.name || a.n != b.n || a.engine != b.engine || a.holds != b.holds ||
        a.state_descriptor != b.state_descriptor)
        return false;
    if (!same(a.lhs, b.lhs) || !same(a.rhs, b.rhs) || !same(a.slack, b.slack)) return false;
    if (a.sub_values.size() != b.sub_values.size()) return false;
    for (const auto& [k, v] : a.sub_values) {
        const auto it = b.sub_values.find(k);
        if (it == b.sub_values.end() || !same(v, it->second)) return false;
    }
    return true;
}

OutputRow sample_row() {
    auto rep = collective_gur(moments(make_two_mode_squeezed(0.731)), SuiteConfig{1.0, 1e-9});
    rep.engine = "gaussian";
    rep.state_descriptor = "two_mode_squeezed(r=0.731)";
    return to_row(rep);
}

} // namespace

TEST_CASE("shortest round-trip double formatting") {
    for (double v : {0.1, 1.0 / 3.0, 2.718281828459045, 1e-300, -0.0, 123456.789}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("report json line round trip is lossless") {
    const auto row = sample_row();
    const auto back = row_from_jsonl(row_to_jsonl(row));
    CHECK(rows_equal(row, back));
}

TEST_CASE("report csv round trip is lossless") {
    const auto row = sample_row();
    std::stringstream buf;
    buf << rows_csv_header() << '\n' << row_to_csv(row) << '\n';
    const auto rows = rows_from_csv(buf);
    REQUIRE(rows.size() == 1);
    CHECK(rows_equal(row, rows[0]));
}

TEST_CASE("csv splitter honors quoting") {
    const auto f = split_csv_line("a,\"b,c\",\"d\"\"e\",f");
    REQUIRE(f.size() == 4);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d\"e");
}

TEST_CASE("csv reader rejects malformed input") {
    std::stringstream empty;
    CHECK_THROWS(rows_from_csv(empty));
    std::stringstream bad_header("nope\n");
    CHECK_THROWS(rows_from_csv(bad_header));
    std::stringstream short_row(rows_csv_header() + "\nonly,three,fields\n");
    CHECK_THROWS(rows_from_csv(short_row));
}

TEST_CASE("verify battery rows round trip through both formats") {
    BatteryOptions opt;
    opt.random_count = 5;
    opt.run_grid = false;
    const auto outcome = run_verify_battery(opt);
    REQUIRE(outcome.all_pass);
    REQUIRE(outcome.rows.size() > 50);

    std::stringstream csv;
    csv << rows_csv_header() << '\n';
    for (const auto& row : outcome.rows) csv << row_to_csv(row) << '\n';
    const auto csv_rows = rows_from_csv(csv);
    REQUIRE(csv_rows.size() == outcome.rows.size());
    for (std::size_t k = 0; k < csv_rows.size(); ++k)
        CHECK(rows_equal(outcome.rows[k], csv_rows[k]));

    for (const auto& row : outcome.rows) {
        const auto back = row_from_jsonl(row_to_jsonl(row));
        CHECK(rows_equal(row, back));
    }
}

TEST_CASE("battery output is sorted and deterministic") {
    BatteryOptions opt;
    opt.random_count = 3;
    opt.run_grid = false;
    const auto a = run_verify_battery(opt);
    const auto b = run_verify_battery(opt);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k)
        CHECK(rows_equal(a.rows[k], b.rows[k]));
    for (std::size_t k = 1; k < a.rows.size(); ++k) {
        const bool ordered =
            a.rows[k - 1].name < a.rows[k].name ||
            (a.rows[k - 1].name == a.rows[k].name &&
             a.rows[k - 1].state_descriptor <= a.rows[k].state_descriptor);
        CHECK(ordered);
    }
}

TEST_CASE("search result json round trip, including rejected points") {
    SearchResult r;
    r.best_params = {0.25, -1.5};
    r.best_value = 0.5;
    r.bound = 0.25;
    r.hur_reference = 0.5;
    r.evaluations = 3;
    r.trace.push_back({{0.25, -1.5}, 0.5, ""});
    r.trace.push_back({{0.9, 2.0}, std::numeric_limits<double>::infinity(), "rejected"});
    const auto parsed = search_result_from_json(search_result_to_json(r, "fam", "obj"));
    CHECK(parsed.family == "fam");
    CHECK(parsed.objective == "obj");
    CHECK(parsed.result.best_params == r.best_params);
    CHECK(parsed.result.best_value == r.best_value);
    REQUIRE(parsed.result.trace.size() == 2);
    CHECK(std::isinf(parsed.result.trace[1].value));
    CHECK(parsed.result.trace[1].note == "rejected");
    CHECK_THROWS(search_result_from_json("{\"command\":\"other\"}"));
}

TEST_CASE("sweep csv carries one column per sub-value") {
    std::vector<std::vector<double>> grid = {{0.0}, {0.5}, {1.0}};
    const auto rows = sweep(Family::two_mode_squeezed, grid);
    const auto csv = sweep_to_csv(rows);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("param_1") == 0);
    CHECK(header.find("schwarz_q_two.qcf") != std::string::npos);
    CHECK(header.find("collective_gur.lhs") != std::string::npos);
    CHECK(header.find("gur_n.offdiag_q") != std::string::npos);
    int data_lines = 0;
    std::string line;
    const auto cols = split_csv_line(header).size();
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++data_lines;
        CHECK(split_csv_line(line).size() == cols);
    }
    CHECK(data_lines == 3);

    // the jsonl form parses back
    const auto j = nlohmann::json::parse(sweep_row_to_jsonl(rows[0]));
    CHECK(j.at("command") == "sweep");
    CHECK(j.at("entries").size() == rows[0].entries.size());
}
