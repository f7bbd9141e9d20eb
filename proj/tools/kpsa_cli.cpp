#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpsa/frank_wolfe.hpp"
#include "kpsa/metrics.hpp"
#include "kpsa/solver.hpp"
#include "kpsa/tntp.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;
constexpr int kExitOracle = 4;

struct Options {
    std::string net_path;
    std::string trips_path;
    int k = 4;
    std::vector<std::string> alpha_overrides;
    std::vector<std::string> iter_overrides;
    std::string out_dir = ".";
    std::string format = "json";
    bool scatter = false;
    bool histogram = false;
    bool oracle = false;
    double gap_tol = 1e-4;
    int oracle_max_iter = 100000;
    int threads = 0;
    std::vector<int> ks;
};

// Shortest round-trip digits, matching the numbers written into reports.
std::string num(double value) { return nlohmann::json(value).dump(); }

void add_common_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--net", opt.net_path, "TNTP network file")->required();
    cmd->add_option("--trips", opt.trips_path, "TNTP trips file")->required();
    cmd->add_option("--alpha", opt.alpha_overrides,
                    "Override a round's shift fraction as n=value (repeatable)");
    cmd->add_option("--iters", opt.iter_overrides,
                    "Override a round's iteration count as n=value (repeatable)");
    cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--format", opt.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_flag("--scatter", opt.scatter, "Also write avg/shortest time pairs as CSV");
    cmd->add_flag("--histogram", opt.histogram, "Also write the deviation histogram as CSV");
    cmd->add_option("--threads", opt.threads, "Worker threads (0 = auto)")
        ->envname("KPSA_THREADS")
        ->capture_default_str();
}

void add_oracle_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--gap-tol", opt.gap_tol, "Oracle relative-gap tolerance")
        ->capture_default_str();
    cmd->add_option("--oracle-max-iter", opt.oracle_max_iter, "Oracle iteration budget")
        ->capture_default_str();
}

// "n=value" round overrides applied over the default schedule.
kpsa::SolverConfig make_config(const Options& opt, int k) {
    kpsa::SolverConfig config = kpsa::SolverConfig::defaults(k);
    config.threads = opt.threads;
    auto apply = [&](const std::vector<std::string>& overrides, bool is_alpha) {
        for (const std::string& text : overrides) {
            std::size_t eq = text.find('=');
            if (eq == std::string::npos) {
                throw kpsa::InvalidInputError("override '" + text + "' is not n=value");
            }
            int n = 0;
            double value = 0;
            try {
                n = std::stoi(text.substr(0, eq));
                value = std::stod(text.substr(eq + 1));
            } catch (const std::exception&) {
                throw kpsa::InvalidInputError("override '" + text + "' is not n=value");
            }
            if (n < 2 || n > k) {
                throw kpsa::InvalidInputError("override '" + text + "' targets round " +
                                              std::to_string(n) + " outside 2.." +
                                              std::to_string(k));
            }
            if (is_alpha) {
                config.schedule[n - 2].alpha = value;
            } else {
                config.schedule[n - 2].iterations = static_cast<int>(value);
            }
        }
    };
    apply(opt.alpha_overrides, true);
    apply(opt.iter_overrides, false);
    config.validate();
    return config;
}

kpsa::ParsedInstance load(const Options& opt) {
    return kpsa::load_instance(opt.net_path, opt.trips_path);
}

std::string summary_line(const kpsa::AssignmentReport& report) {
    std::string r = report.pearson_r ? num(*report.pearson_r) : "n/a";
    return report.instance + " k=" + std::to_string(report.k) + " E=" +
           num(report.e_percent) + "% r=" + r + " cpu_ms=" + num(report.cpu_ms);
}

void write_outputs(const Options& opt, const kpsa::ParsedInstance& instance,
                   const kpsa::Solution& solution, const kpsa::AssignmentReport& report) {
    namespace fs = std::filesystem;
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw kpsa::IoError("cannot create output directory: " + dir.string());

    std::string base = instance.name + "_k" + std::to_string(report.k);
    auto open = [&](const std::string& suffix) {
        fs::path path = dir / (base + suffix);
        std::ofstream out(path);
        if (!out) throw kpsa::IoError("cannot open output file: " + path.string());
        return out;
    };

    auto flows = open("_flows.tsv");
    kpsa::write_flows(instance.network, solution.link_state, flows);

    auto report_out = open(opt.format == "json" ? "_report.json" : "_report.csv");
    kpsa::write_report(report,
                       opt.format == "json" ? kpsa::ReportFormat::json
                                            : kpsa::ReportFormat::csv,
                       report_out);
    if (opt.scatter) {
        auto out = open("_scatter.csv");
        kpsa::write_scatter_csv(report, out);
    }
    if (opt.histogram) {
        auto out = open("_histogram.csv");
        kpsa::write_histogram_csv(report, out);
    }
}

// Solves and reports for one k; on success prints the summary line.
int run_solve_once(const Options& opt, const kpsa::ParsedInstance& instance, int k,
                   kpsa::AssignmentReport* report_out = nullptr,
                   kpsa::Solution* solution_out = nullptr) {
    kpsa::SolverConfig config;
    try {
        config = make_config(opt, k);
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    kpsa::Solution solution;
    kpsa::AssignmentReport report;
    try {
        solution = kpsa::solve(instance.network, instance.demand, config);
        report = kpsa::build_report(solution, instance.network, instance.demand,
                                    opt.threads);
        report.instance = instance.name;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    try {
        write_outputs(opt, instance, solution, report);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kExitIo;
    }
    std::cout << summary_line(report) << '\n';
    if (report_out) *report_out = std::move(report);
    if (solution_out) *solution_out = std::move(solution);
    return 0;
}

int run_compare(const Options& opt, const kpsa::ParsedInstance& instance) {
    kpsa::Solution solution;
    kpsa::AssignmentReport report;
    if (int rc = run_solve_once(opt, instance, opt.k, &report, &solution); rc != 0) {
        return rc;
    }
    kpsa::OracleResult oracle;
    try {
        oracle = kpsa::frank_wolfe_solve(instance.network, instance.demand, opt.gap_tol,
                                         opt.oracle_max_iter, opt.threads);
    } catch (const std::exception& e) {
        std::cerr << "oracle error: " << e.what() << '\n';
        return kExitSolver;
    }

    const auto& v = solution.link_state.flow;
    const auto& w = oracle.link_flows;
    double links_r = 0.0;
    try {
        links_r = kpsa::pearson_r(v, w);
    } catch (const std::exception& e) {
        std::cerr << "oracle error: " << e.what() << '\n';
        return kExitSolver;
    }
    double tstt = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) tstt += v[a] * solution.link_state.time[a];
    double ratio = oracle.total_system_time > 0 ? tstt / oracle.total_system_time : 0.0;
    double flow_dev_sum = 0.0;
    int flow_dev_count = 0;
    for (std::size_t a = 0; a < v.size(); ++a) {
        if (w[a] > 1e-9) {
            flow_dev_sum += std::abs(v[a] - w[a]) / w[a] * 100.0;
            ++flow_dev_count;
        }
    }
    double flow_dev = flow_dev_count > 0 ? flow_dev_sum / flow_dev_count : 0.0;

    std::cout << "links_pearson_r=" << num(links_r) << '\n';
    std::cout << "tstt_kpsa=" << num(tstt) << " tstt_oracle=" << num(oracle.total_system_time)
              << " ratio=" << num(ratio) << " deviation_percent="
              << num(std::abs(ratio - 1.0) * 100.0) << '\n';
    std::cout << "mean_link_flow_deviation_percent=" << num(flow_dev) << '\n';
    std::cout << "oracle_gap=" << num(oracle.relative_gap)
              << " oracle_iterations=" << oracle.iterations
              << " oracle_converged=" << (oracle.converged ? "true" : "false") << '\n';
    if (!oracle.converged) {
        std::cerr << "oracle failed to reach gap " << num(opt.gap_tol) << " within "
                  << opt.oracle_max_iter << " iterations\n";
        return kExitOracle;
    }
    return 0;
}

int run_sweep(const Options& opt, const kpsa::ParsedInstance& instance) {
    std::cout << "k\tE_percent\tpearson_r\tcpu_ms\n";
    for (int k : opt.ks) {
        kpsa::AssignmentReport report;
        if (int rc = run_solve_once(opt, instance, k, &report); rc != 0) return rc;
        std::string r = report.pearson_r ? num(*report.pearson_r) : "n/a";
        std::cout << k << '\t' << num(report.e_percent) << '\t' << r << '\t'
                  << num(report.cpu_ms) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-paths subtracting-adding traffic assignment"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* solve = app.add_subcommand("solve", "Assign demand and write flows + report");
    add_common_options(solve, opt);
    solve->add_option("--k", opt.k, "Paths per OD pair")->capture_default_str();
    solve->add_flag("--oracle", opt.oracle, "Also compare against the equilibrium oracle");
    add_oracle_options(solve, opt);

    CLI::App* compare =
        app.add_subcommand("compare", "Solve, then validate against the equilibrium oracle");
    add_common_options(compare, opt);
    compare->add_option("--k", opt.k, "Paths per OD pair")->capture_default_str();
    add_oracle_options(compare, opt);

    CLI::App* sweep = app.add_subcommand("sweep", "Solve for several k and tabulate");
    add_common_options(sweep, opt);
    sweep->add_option("--ks", opt.ks, "Path counts to run (e.g. --ks 2 3 4)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    kpsa::ParsedInstance instance;
    try {
        instance = load(opt);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (sweep->parsed()) {
        if (opt.ks.empty()) {
            std::cerr << "usage error: --ks must list at least one path count\n";
            return kExitUsage;
        }
        return run_sweep(opt, instance);
    }
    if (compare->parsed()) return run_compare(opt, instance);
    if (opt.oracle) return run_compare(opt, instance);
    return run_solve_once(opt, instance, opt.k);
}
