#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gur/serialize.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

// runs the CLI through the shell, capturing stdout (stderr untouched)
RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + GUR_CLI_PATH + " " + args;
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
        output.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/gur_cli_test_") + name;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("2>/dev/null").exit_code == 2);
    CHECK(run("verify --no-such-flag 2>/dev/null").exit_code == 2);
    CHECK(run("verify --engine marble 2>/dev/null").exit_code == 2);
    CHECK(run("sweep --family no_such_family 2>/dev/null").exit_code == 2);
    CHECK(run("minimize --family two_mode_squeezed --objective nope 2>/dev/null").exit_code == 2);
    CHECK(run("report /no/such/file 2>/dev/null").exit_code == 2);
}

TEST_CASE("gaussian verify passes and is reproducible") {
    const auto a = run("verify --engine gaussian");
    REQUIRE(a.exit_code == 0);
    CHECK(count_lines(a.output) >= 4000);
    // byte-identical across repeated runs
    const auto b = run("verify --engine gaussian");
    CHECK(a.output == b.output);
    // every line parses
    std::istringstream lines(a.output);
    std::string line;
    int parsed = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto row = gur::row_from_jsonl(line);
        CHECK(row.holds);
        ++parsed;
    }
    CHECK(parsed == count_lines(a.output));
}

TEST_CASE("csv and json verify streams carry the same rows") {
    const auto js = run("verify --engine gaussian --seed 5");
    const auto cs = run("verify --engine gaussian --seed 5 --format csv");
    REQUIRE(js.exit_code == 0);
    REQUIRE(cs.exit_code == 0);
    std::istringstream csv_stream(cs.output);
    const auto csv_rows = gur::rows_from_csv(csv_stream);
    std::istringstream json_stream(js.output);
    std::string line;
    std::size_t k = 0;
    while (std::getline(json_stream, line)) {
        if (line.empty()) continue;
        REQUIRE(k < csv_rows.size());
        const auto row = gur::row_from_jsonl(line);
        CHECK(row.name == csv_rows[k].name);
        CHECK(row.slack == csv_rows[k].slack); // numbers survive both formats
        ++k;
    }
    CHECK(k == csv_rows.size());
}

TEST_CASE("hbar rescaling keeps the battery green") {
    CHECK(run("verify --engine gaussian --hbar 2 >/dev/null").exit_code == 0);
}

TEST_CASE("unreasonably tight tolerance trips the grid engine") {
    const auto r = run("verify --engine grid --tol 1e-15 >/dev/null 2>&1");
    CHECK(r.exit_code == 1);
}

TEST_CASE("engine corruption flips the exit code") {
    CHECK(run("verify --engine gaussian >/dev/null 2>&1",
              "GUR_MUTATE=gaussian_qcf_sign").exit_code == 1);
    CHECK(run("verify --engine grid >/dev/null 2>&1",
              "GUR_MUTATE=grid_qcf_sign").exit_code == 1);
}

TEST_CASE("config file mirrors the flags") {
    const std::string path = temp_path("config.json");
    {
        std::ofstream cfg(path);
        cfg << "{\"engine\":\"gaussian\",\"seed\":5}\n";
    }
    const auto via_config = run("verify --config " + path);
    const auto via_flags = run("verify --engine gaussian --seed 5");
    REQUIRE(via_config.exit_code == 0);
    CHECK(via_config.output == via_flags.output);

    // explicit flags win over the config value
    const auto overridden = run("verify --config " + path + " --seed 9");
    const auto direct = run("verify --engine gaussian --seed 9");
    CHECK(overridden.output == direct.output);

    {
        std::ofstream cfg(path);
        cfg << "{\"engine\":\"gaussian\",\"no_such_key\":1}\n";
    }
    CHECK(run("verify --config " + path + " 2>/dev/null").exit_code == 2);
    std::remove(path.c_str());
}

TEST_CASE("sweep emits a monotone covariance column") {
    const auto r = run("sweep --family two_mode_squeezed --format csv");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string header;
    std::getline(lines, header);
    const auto cols = gur::split_csv_line(header);
    std::size_t qcf_col = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == "schwarz_q_two.qcf") qcf_col = i;
    REQUIRE(qcf_col < cols.size());
    double prev = -1.0;
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto f = gur::split_csv_line(line);
        const double qcf = std::stod(f[qcf_col]);
        CHECK(qcf > prev);
        prev = qcf;
        ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("sweep rejects the unsweepable family") {
    CHECK(run("sweep --family random_gaussian 2>/dev/null").exit_code == 2);
}

TEST_CASE("minimize and report work end to end") {
    const std::string path = temp_path("minimize.json");
    const auto r = run("minimize --family two_mode_squeezed --objective individual_product "
                       "--budget 200 --seed 1 --out " + path);
    REQUIRE(r.exit_code == 0);

    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto parsed = gur::search_result_from_json(buf.str());
    CHECK(parsed.result.best_value == Catch::Approx(0.5).margin(1e-6));
    CHECK(parsed.result.bound == 0.25);
    CHECK(parsed.result.hur_reference == 0.5);

    const auto rep = run("report " + path);
    REQUIRE(rep.exit_code == 0);
    CHECK(rep.output.find("individual_product") != std::string::npos);
    CHECK(rep.output.find("0.25") != std::string::npos); // bound column
    CHECK(rep.output.find("0.5") != std::string::npos);  // best and reference

    // determinism of the full file for identical config and seed
    const std::string path2 = temp_path("minimize2.json");
    run("minimize --family two_mode_squeezed --objective individual_product --budget 200 "
        "--seed 1 --out " + path2);
    std::ifstream in2(path2);
    std::stringstream buf2;
    buf2 << in2.rdbuf();
    CHECK(buf.str() == buf2.str());
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("report summarizes a verify stream with one row per relation") {
    const std::string path = temp_path("verify.jsonl");
    REQUIRE(run("verify --out " + path + " >/dev/null").exit_code == 0);
    const auto rep = run("report " + path);
    REQUIRE(rep.exit_code == 0);
    // all twelve relation names appear
    for (const char* name :
         {"robertson", "collective_gur", "gur_n", "gur_two", "schwarz_q_two", "schwarz_p_two",
          "gur_two_bound", "symmetric_two", "schwarz_three_q", "schwarz_three_p",
          "gur_three_bound", "symmetric_three"}) {
        INFO(name);
        CHECK(rep.output.find(name) != std::string::npos);
    }
    CHECK(rep.output.find("NO") == std::string::npos); // everything holds

    // corrupt file: exit 2
    {
        std::ofstream f(path);
        f << "{\"name\": broken\n";
    }
    CHECK(run("report " + path + " 2>/dev/null").exit_code == 2);
    std::remove(path.c_str());
}

TEST_CASE("report summarizes a sweep") {
    const std::string path = temp_path("sweep.jsonl");
    REQUIRE(run("sweep --family correlated_triple --out " + path).exit_code == 0);
    const auto rep = run("report " + path);
    REQUIRE(rep.exit_code == 0);
    CHECK(rep.output.find("gur_three_bound") != std::string::npos);
    CHECK(rep.output.find("NO") == std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("report understands the csv flavors too") {
    const std::string sweep_path = temp_path("sweep.csv");
    REQUIRE(run("sweep --family two_mode_squeezed --format csv --out " + sweep_path)
                .exit_code == 0);
    const auto sw = run("report " + sweep_path);
    REQUIRE(sw.exit_code == 0);
    CHECK(sw.output.find("sweep summary (9 points)") != std::string::npos);
    CHECK(sw.output.find("gur_two_bound") != std::string::npos);
    CHECK(sw.output.find("NO") == std::string::npos);
    std::remove(sweep_path.c_str());

    const std::string verify_path = temp_path("verify.csv");
    REQUIRE(run("verify --engine gaussian --format csv --out " + verify_path).exit_code == 0);
    const auto vf = run("report " + verify_path);
    REQUIRE(vf.exit_code == 0);
    CHECK(vf.output.find("collective_gur") != std::string::npos);
    CHECK(vf.output.find("family saturation") != std::string::npos);
    std::remove(verify_path.c_str());
}
