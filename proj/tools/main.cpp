#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gur/battery.hpp"
#include "gur/numfmt.hpp"
#include "gur/searcher.hpp"
#include "gur/serialize.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitRelationFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string engine = "both";
    double hbar = 1.0;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::string format = "json";
    std::string family;
    std::string objective = "individual_product";
    std::string r_grid;
    int budget = 200;
    std::string config_path;
    std::string input; // report subcommand
};

// Applies a JSON config file whose keys mirror the flags one-to-one.
// Explicitly passed flags win; unknown keys are errors.
void apply_config(const std::string& path, CLI::App* sub, CommonOptions& o) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--config", std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");

    auto unset = [&](const std::string& flag) {
        const auto* opt = sub->get_option_no_throw("--" + flag);
        return opt == nullptr || opt->count() == 0;
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "engine" && unset("engine")) o.engine = value.get<std::string>();
        else if (key == "hbar" && unset("hbar")) o.hbar = value.get<double>();
        else if (key == "tol" && unset("tol")) o.tol = value.get<double>();
        else if (key == "seed" && unset("seed")) o.seed = value.get<std::uint64_t>();
        else if (key == "out" && unset("out")) o.out = value.get<std::string>();
        else if (key == "format" && unset("format")) o.format = value.get<std::string>();
        else if (key == "family" && unset("family")) o.family = value.get<std::string>();
        else if (key == "objective" && unset("objective")) o.objective = value.get<std::string>();
        else if (key == "r-grid" && unset("r-grid")) o.r_grid = value.get<std::string>();
        else if (key == "budget" && unset("budget")) o.budget = value.get<int>();
        else if (key == "engine" || key == "hbar" || key == "tol" || key == "seed" ||
                 key == "out" || key == "format" || key == "family" || key == "objective" ||
                 key == "r-grid" || key == "budget") {
            // flag explicitly set; config value ignored
        } else {
            throw CLI::ValidationError("--config", "unknown config key '" + key + "'");
        }
    }
}

class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> parse_grid_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

int run_verify(const CommonOptions& o) {
    if (o.engine != "gaussian" && o.engine != "grid" && o.engine != "both") {
        std::cerr << "verify: unknown engine '" << o.engine << "'\n";
        return kExitUsage;
    }
    gur::BatteryOptions bo;
    bo.hbar = o.hbar;
    bo.tol_override = o.tol;
    bo.seed = o.seed;
    bo.run_gaussian = o.engine != "grid";
    bo.run_grid = o.engine != "gaussian";

    const auto outcome = gur::run_verify_battery(bo);

    OutputTarget target(o.out);
    auto& os = target.stream();
    if (o.format == "csv") {
        os << gur::rows_csv_header() << '\n';
        for (const auto& row : outcome.rows) os << gur::row_to_csv(row) << '\n';
    } else {
        for (const auto& row : outcome.rows) os << gur::row_to_jsonl(row) << '\n';
    }
    if (!outcome.all_pass) {
        std::cerr << "verify: FAILED at " << outcome.first_failure << '\n';
        return kExitRelationFailure;
    }
    return kExitPass;
}

int run_sweep(const CommonOptions& o) {
    gur::Family family;
    try {
        family = gur::family_from_string(o.family);
    } catch (const std::exception& e) {
        std::cerr << "sweep: " << e.what() << '\n';
        return kExitUsage;
    }
    if (family == gur::Family::random_gaussian) {
        std::cerr << "sweep: random_gaussian has no scalar parameter grid; "
                     "use two_mode_squeezed, correlated_triple or grid_correlated_gaussian\n";
        return kExitUsage;
    }

    std::vector<double> values;
    if (!o.r_grid.empty()) {
        values = parse_grid_values(o.r_grid);
    } else if (family == gur::Family::correlated_triple) {
        values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    } else if (family == gur::Family::grid_correlated_gaussian) {
        // b values with a = 1; |b| < 1 keeps the sample normalizable
        values = {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75};
    } else {
        values = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    }
    if (values.empty()) {
        std::cerr << "sweep: empty parameter grid\n";
        return kExitUsage;
    }
    std::vector<std::vector<double>> grid;
    for (double v : values) {
        if (family == gur::Family::grid_correlated_gaussian)
            grid.push_back({1.0, v}); // a fixed at 1, the grid walks b
        else
            grid.push_back({v});
    }

    const bool grid_engine = family == gur::Family::grid_correlated_gaussian;
    const gur::SuiteConfig cfg{o.hbar, o.tol.value_or(grid_engine ? 1e-6 : 1e-9)};
    const auto rows = gur::sweep(family, grid, cfg);

    OutputTarget target(o.out);
    auto& os = target.stream();
    if (o.format == "csv") {
        os << gur::sweep_to_csv(rows);
    } else {
        for (const auto& row : rows) os << gur::sweep_row_to_jsonl(row) << '\n';
    }
    return kExitPass;
}

int run_minimize(const CommonOptions& o) {
    if (o.format != "json") {
        std::cerr << "minimize: results serialize to JSON only\n";
        return kExitUsage;
    }
    gur::SearchProblem problem;
    try {
        const auto family = gur::family_from_string(o.family);
        const auto objective = gur::objective_from_string(o.objective);
        const bool grid_engine = family == gur::Family::grid_correlated_gaussian;
        const gur::SuiteConfig cfg{o.hbar, o.tol.value_or(grid_engine ? 1e-6 : 1e-9)};
        problem = gur::make_problem(family, objective, 2, cfg);
    } catch (const std::exception& e) {
        std::cerr << "minimize: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto result = gur::minimize(problem, o.budget, o.seed);
    OutputTarget target(o.out);
    target.stream() << gur::search_result_to_json(result, gur::to_string(problem.family),
                                                  gur::to_string(problem.objective))
                    << '\n';
    if (result.best_value < result.bound - problem.config.tol) {
        std::cerr << "minimize: best value " << gur::format_double(result.best_value)
                  << " undercuts the bound " << gur::format_double(result.bound)
                  << "; engine bug\n";
        return kExitRelationFailure;
    }
    return kExitPass;
}

std::string family_of(const std::string& descriptor) {
    const auto pos = descriptor.find('(');
    return pos == std::string::npos ? descriptor : descriptor.substr(0, pos);
}

int report_verify_rows(const std::vector<gur::OutputRow>& rows, std::ostream& os) {
    struct Agg {
        int count = 0;
        double min_slack = std::numeric_limits<double>::infinity();
        double max_slack = -std::numeric_limits<double>::infinity();
        bool all_hold = true;
    };
    std::map<std::string, Agg> relations, checks;
    std::map<std::string, Agg> families; // collective_gur slack per family
    for (const auto& row : rows) {
        auto& agg = row.is_check() ? checks[row.name] : relations[row.name];
        agg.count += 1;
        agg.min_slack = std::min(agg.min_slack, row.slack);
        agg.max_slack = std::max(agg.max_slack, row.slack);
        agg.all_hold = agg.all_hold && row.holds;
        if (!row.is_check() && row.name == "collective_gur") {
            auto& fam = families[family_of(row.state_descriptor)];
            fam.count += 1;
            fam.min_slack = std::min(fam.min_slack, row.slack);
            fam.max_slack = std::max(fam.max_slack, row.slack);
            fam.all_hold = fam.all_hold && row.holds;
        }
    }

    os << "== relation summary ==\n";
    os << std::left << std::setw(20) << "relation" << std::setw(8) << "rows" << std::setw(26)
       << "min_slack" << "all_hold\n";
    for (const auto& [name, agg] : relations)
        os << std::left << std::setw(20) << name << std::setw(8) << agg.count << std::setw(26)
           << gur::format_double(agg.min_slack) << (agg.all_hold ? "yes" : "NO") << '\n';

    if (!checks.empty()) {
        os << "\n== engine checks ==\n";
        os << std::left << std::setw(32) << "check" << std::setw(8) << "rows" << std::setw(26)
           << "worst" << "all_pass\n";
        for (const auto& [name, agg] : checks)
            os << std::left << std::setw(32) << name << std::setw(8) << agg.count
               << std::setw(26) << gur::format_double(agg.min_slack)
               << (agg.all_hold ? "yes" : "NO") << '\n';
    }

    if (!families.empty()) {
        os << "\n== family saturation (collective_gur slack) ==\n";
        os << std::left << std::setw(28) << "family" << std::setw(8) << "rows" << std::setw(26)
           << "min_slack" << "max_slack\n";
        for (const auto& [name, agg] : families)
            os << std::left << std::setw(28) << name << std::setw(8) << agg.count
               << std::setw(26) << gur::format_double(agg.min_slack)
               << gur::format_double(agg.max_slack) << '\n';
    }
    return kExitPass;
}

int report_minimize(const gur::ParsedSearchResult& parsed, std::ostream& os) {
    os << "== searcher minimum ==\n";
    os << std::left << std::setw(26) << "objective" << std::setw(26) << "family"
       << std::setw(22) << "best" << std::setw(22) << "bound" << std::setw(22)
       << "hur_reference" << "evaluations\n";
    os << std::left << std::setw(26) << parsed.objective << std::setw(26) << parsed.family
       << std::setw(22) << gur::format_double(parsed.result.best_value) << std::setw(22)
       << gur::format_double(parsed.result.bound) << std::setw(22)
       << gur::format_double(parsed.result.hur_reference) << parsed.result.evaluations << '\n';
    os << "best_params =";
    for (double p : parsed.result.best_params) os << ' ' << gur::format_double(p);
    os << '\n';
    return kExitPass;
}

int report_sweep_csv(const std::string& text, std::ostream& os) {
    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    const auto cols = gur::split_csv_line(header);

    struct Slot {
        std::string label;
        std::size_t slack_col;
        std::size_t holds_col;
    };
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto pos = cols[i].rfind(".slack");
        if (pos == std::string::npos || pos + 6 != cols[i].size()) continue;
        const std::string label = cols[i].substr(0, pos);
        std::size_t holds_col = cols.size();
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] == label + ".holds") holds_col = k;
        if (holds_col < cols.size()) slots.push_back({label, i, holds_col});
    }
    if (slots.empty()) {
        std::cerr << "report: sweep CSV carries no relation columns\n";
        return kExitUsage;
    }

    struct Agg {
        int count = 0;
        double min_slack = std::numeric_limits<double>::infinity();
        bool all_hold = true;
    };
    std::map<std::string, Agg> labels;
    std::string line;
    int points = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto f = gur::split_csv_line(line);
        if (f.size() != cols.size())
            throw std::runtime_error("sweep CSV record has " + std::to_string(f.size()) +
                                     " fields, header has " + std::to_string(cols.size()));
        ++points;
        for (const auto& slot : slots) {
            auto& agg = labels[slot.label];
            agg.count += 1;
            agg.min_slack = std::min(agg.min_slack, std::stod(f[slot.slack_col]));
            agg.all_hold = agg.all_hold && f[slot.holds_col] == "true";
        }
    }
    os << "== sweep summary (" << points << " points) ==\n";
    os << std::left << std::setw(30) << "relation" << std::setw(8) << "rows" << std::setw(26)
       << "min_slack" << "all_hold\n";
    for (const auto& [label, agg] : labels)
        os << std::left << std::setw(30) << label << std::setw(8) << agg.count << std::setw(26)
           << gur::format_double(agg.min_slack) << (agg.all_hold ? "yes" : "NO") << '\n';
    return kExitPass;
}

int report_sweep_lines(const std::vector<nlohmann::json>& rows, std::ostream& os) {
    struct Agg {
        int count = 0;
        double min_slack = std::numeric_limits<double>::infinity();
        bool all_hold = true;
    };
    std::map<std::string, Agg> labels;
    for (const auto& row : rows) {
        for (const auto& e : row.at("entries")) {
            if (!e.at("applicable").get<bool>()) continue;
            auto& agg = labels[e.at("label").get<std::string>()];
            agg.count += 1;
            agg.min_slack = std::min(agg.min_slack, e.at("slack").get<double>());
            agg.all_hold = agg.all_hold && e.at("holds").get<bool>();
        }
    }
    os << "== sweep summary (" << rows.size() << " points) ==\n";
    os << std::left << std::setw(30) << "relation" << std::setw(8) << "rows" << std::setw(26)
       << "min_slack" << "all_hold\n";
    for (const auto& [label, agg] : labels)
        os << std::left << std::setw(30) << label << std::setw(8) << agg.count << std::setw(26)
           << gur::format_double(agg.min_slack) << (agg.all_hold ? "yes" : "NO") << '\n';
    return kExitPass;
}

int run_report(const CommonOptions& o) {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) {
        std::cerr << "report: cannot open input file '" << o.input << "'\n";
        return kExitUsage;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.empty()) {
        std::cerr << "report: input file is empty\n";
        return kExitUsage;
    }

    OutputTarget target(o.out);
    auto& os = target.stream();
    try {
        if (text[0] == '{') {
            // JSON lines: verify rows, sweep rows, or one minimize object
            std::istringstream lines(text);
            std::string first;
            std::getline(lines, first);
            const auto j = nlohmann::json::parse(first);
            if (j.contains("command") && j.at("command") == "minimize")
                return report_minimize(gur::search_result_from_json(first), os);
            if (j.contains("command") && j.at("command") == "sweep") {
                std::vector<nlohmann::json> rows{j};
                std::string line;
                while (std::getline(lines, line))
                    if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
                return report_sweep_lines(rows, os);
            }
            std::vector<gur::OutputRow> rows{gur::row_from_jsonl(first)};
            std::string line;
            while (std::getline(lines, line))
                if (!line.empty()) rows.push_back(gur::row_from_jsonl(line));
            return report_verify_rows(rows, os);
        }
        if (text.rfind(gur::rows_csv_header(), 0) == 0) {
            std::istringstream stream(text);
            return report_verify_rows(gur::rows_from_csv(stream), os);
        }
        if (text.rfind("param_1,", 0) == 0) return report_sweep_csv(text, os);
        std::cerr << "report: unrecognized input format (expected verify/sweep/minimize "
                     "output)\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "report: corrupt input: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertainty-relation laboratory for entangled identical particles"};
    app.require_subcommand(1);

    CommonOptions o;
    auto add_common = [&](CLI::App* sub, bool with_family) {
        sub->add_option("--hbar", o.hbar, "value of hbar (natural units by default)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol", o.tol,
                        "slack tolerance override (replaces the per-engine defaults "
                        "1e-9 gaussian / 1e-6 grid)");
        sub->add_option("--seed", o.seed, "base seed for random states and the searcher");
        sub->add_option("--out", o.out, "output path, '-' for stdout");
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--config", o.config_path, "JSON config file mirroring the flags");
        if (with_family)
            sub->add_option("--family", o.family,
                            "state family: two_mode_squeezed, correlated_triple, "
                            "random_gaussian, grid_correlated_gaussian");
    };

    auto* verify = app.add_subcommand("verify", "run the full relation suite on the built-in "
                                                "state battery");
    add_common(verify, false);
    verify->add_option("--engine", o.engine, "gaussian, grid or both")
        ->check(CLI::IsMember({"gaussian", "grid", "both"}));

    auto* sweep = app.add_subcommand("sweep", "evaluate the suite over a parameter grid");
    add_common(sweep, true);
    sweep->add_option("--r-grid", o.r_grid,
                      "comma-separated parameter values (family's scalar parameter)");

    auto* minimize = app.add_subcommand("minimize", "search a family for minimal uncertainty "
                                                    "products");
    add_common(minimize, true);
    minimize->add_option("--objective", o.objective,
                         "collective_product, sum_product_two, sum_product_three or "
                         "individual_product");
    minimize->add_option("--budget", o.budget, "objective evaluation budget")
        ->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "summarize a previous output file");
    add_common(report, false);
    report->add_option("input", o.input, "verify/sweep/minimize output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!o.config_path.empty()) apply_config(o.config_path, sub, o);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (sub == verify) return run_verify(o);
        if (sub == sweep) return run_sweep(o);
        if (sub == minimize) return run_minimize(o);
        if (sub == report) return run_report(o);
    } catch (const std::exception& e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
