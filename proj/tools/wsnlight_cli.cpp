// wsnlight command line: validate scenarios, run simulations, and reproduce
// the reference five-lamp comparison without any configuration.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "wsnlight.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1; // validation errors, acceptance miss
constexpr int kExitIo = 2;      // unreadable input, unwritable output

struct ScenarioDeleter {
    void operator()(wsn_scenario* sc) const { wsn_scenario_free(sc); }
};
struct ResultDeleter {
    void operator()(wsn_result* r) const { wsn_result_free(r); }
};
using ScenarioPtr = std::unique_ptr<wsn_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<wsn_result, ResultDeleter>;

struct CommonOpts {
    std::string scenario_path;
    uint64_t seed = 0;
    bool seed_set = false;
    double duration = 0;
    bool duration_set = false;
    std::string trace_out;
    std::string report_out;
    std::string report_csv;
    int verbosity = 0; // -q = -1, -v = +1
};

void add_tuning_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Random seed override")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--duration", opts.duration, "Simulated duration override, seconds")
        ->each([&](const std::string&) { opts.duration_set = true; });
    cmd->add_flag(
        "-v,--verbose", [&](int64_t n) { opts.verbosity += static_cast<int>(n); },
        "Keep every trace record kind");
    cmd->add_flag(
        "-q,--quiet", [&](int64_t n) { opts.verbosity -= static_cast<int>(n); },
        "Suppress the stdout summary");
}

int load_scenario(const CommonOpts& opts, ScenarioPtr& out) {
    wsn_scenario* sc = nullptr;
    const wsn_status st = wsn_scenario_from_file(opts.scenario_path.c_str(), &sc);
    if (st == WSN_ERR_IO) {
        std::fprintf(stderr, "error: %s\n", wsn_last_error());
        return kExitIo;
    }
    if (st != WSN_OK) {
        std::fprintf(stderr, "error: %s\n", wsn_last_error());
        return kExitFailure;
    }
    out.reset(sc);
    return kExitOk;
}

void apply_overrides(const CommonOpts& opts, wsn_scenario* sc) {
    if (opts.seed_set) wsn_scenario_set_seed(sc, opts.seed);
    if (opts.duration_set) wsn_scenario_set_duration(sc, opts.duration);
    if (opts.verbosity > 0) wsn_scenario_set_trace(sc, "all");
}

bool write_file(const std::string& path, const char* content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

int validate_or_report(wsn_scenario* sc, bool print_ok) {
    char* diags = nullptr;
    const wsn_status st = wsn_scenario_validate(sc, &diags);
    if (diags && *diags) std::fputs(diags, st == WSN_OK ? stdout : stderr);
    wsn_string_free(diags);
    if (st != WSN_OK) return kExitFailure;
    if (print_ok) std::printf("OK\n");
    return kExitOk;
}

int run_simulation(wsn_scenario* sc, ResultPtr& out) {
    wsn_result* res = nullptr;
    const wsn_status st = wsn_run(sc, &res);
    if (st != WSN_OK) {
        std::fprintf(stderr, "error: %s\n", wsn_last_error());
        return st == WSN_ERR_VALIDATION ? kExitFailure : kExitIo;
    }
    out.reset(res);
    return kExitOk;
}

int cmd_run(CommonOpts& opts, bool with_trace) {
    ScenarioPtr sc;
    if (int rc = load_scenario(opts, sc)) return rc;
    apply_overrides(opts, sc.get());
    if (int rc = validate_or_report(sc.get(), false)) return rc;

    ResultPtr res;
    if (int rc = run_simulation(sc.get(), res)) return rc;

    if (with_trace) {
        const std::string trace_path = opts.trace_out.empty() ? "trace.tsv" : opts.trace_out;
        if (!write_file(trace_path, wsn_result_trace_text(res.get()))) {
            std::fprintf(stderr, "error: cannot write %s\n", trace_path.c_str());
            return kExitIo;
        }
    }
    const std::string report_path = opts.report_out.empty() ? "report.txt" : opts.report_out;
    if (!write_file(report_path, wsn_result_report_text(res.get()))) {
        std::fprintf(stderr, "error: cannot write %s\n", report_path.c_str());
        return kExitIo;
    }
    if (!opts.report_csv.empty() &&
        !write_file(opts.report_csv, wsn_result_report_csv(res.get()))) {
        std::fprintf(stderr, "error: cannot write %s\n", opts.report_csv.c_str());
        return kExitIo;
    }

    if (opts.verbosity >= 0) {
        wsn_energy e{};
        wsn_result_energy(res.get(), &e);
        std::printf("simulated: %.1f Wh/day, %.1f Wh/month\n", e.total_wh_day, e.total_wh_month);
        std::printf("baseline (all lamps full): %.1f Wh/day, %.1f Wh/month\n", e.baseline_wh_day,
                    e.baseline_wh_month);
        std::printf("savings: %.1f Wh/month\n", e.savings_wh_month);
        const double done = wsn_result_commissioning_time(res.get());
        if (done >= 0) std::printf("commissioning finished at %.3f s\n", done);
    }
    return kExitOk;
}

int cmd_report(CommonOpts& opts) {
    ScenarioPtr sc;
    if (int rc = load_scenario(opts, sc)) return rc;
    apply_overrides(opts, sc.get());
    if (int rc = validate_or_report(sc.get(), false)) return rc;
    ResultPtr res;
    if (int rc = run_simulation(sc.get(), res)) return rc;
    std::fputs(wsn_result_report_text(res.get()), stdout);
    if (!opts.report_out.empty() &&
        !write_file(opts.report_out, wsn_result_report_text(res.get()))) {
        std::fprintf(stderr, "error: cannot write %s\n", opts.report_out.c_str());
        return kExitIo;
    }
    return kExitOk;
}

int cmd_validate(CommonOpts& opts) {
    ScenarioPtr sc;
    if (int rc = load_scenario(opts, sc)) return rc;
    return validate_or_report(sc.get(), true);
}

int cmd_table2(CommonOpts& opts, bool baseline_only) {
    wsn_table2_figures f{};
    wsn_table2_arithmetic(&f);

    if (baseline_only) {
        std::printf("normal system: %.0f Wh/day, %.0f Wh/month\n", f.normal_wh_day,
                    f.normal_wh_month);
        return kExitOk;
    }

    wsn_scenario* raw = nullptr;
    wsn_scenario_table2(&raw);
    ScenarioPtr sc(raw);
    apply_overrides(opts, sc.get());

    ResultPtr res;
    if (int rc = run_simulation(sc.get(), res)) return rc;
    if (!opts.trace_out.empty() &&
        !write_file(opts.trace_out, wsn_result_trace_text(res.get()))) {
        std::fprintf(stderr, "error: cannot write %s\n", opts.trace_out.c_str());
        return kExitIo;
    }
    if (!opts.report_out.empty() &&
        !write_file(opts.report_out, wsn_result_report_text(res.get()))) {
        std::fprintf(stderr, "error: cannot write %s\n", opts.report_out.c_str());
        return kExitIo;
    }

    wsn_energy e{};
    wsn_result_energy(res.get(), &e);

    auto dev = [](double sim, double ref) { return 100.0 * (sim - ref) / ref; };
    std::printf("five-lamp comparison, %0.f simulated days\n",
                opts.duration_set ? opts.duration / 86400.0 : 30.0);
    std::printf("%-28s %10s %12s %10s\n", "metric", "reference", "simulated", "deviation");
    std::printf("%-28s %10.0f %12s %10s\n", "normal Wh/day", f.normal_wh_day, "-", "-");
    std::printf("%-28s %10.0f %12s %10s\n", "normal Wh/month", f.normal_wh_month, "-", "-");
    std::printf("%-28s %10.0f %12.1f %9.2f%%\n", "proposed Wh/day", f.proposed_wh_day,
                e.total_wh_day, dev(e.total_wh_day, f.proposed_wh_day));
    std::printf("%-28s %10.0f %12.1f %9.2f%%\n", "proposed Wh/month", f.proposed_wh_month,
                e.total_wh_month, dev(e.total_wh_month, f.proposed_wh_month));
    std::printf("%-28s %10.0f %12.1f %9.2f%%\n", "savings Wh/month", f.savings_wh_month,
                e.savings_wh_month, dev(e.savings_wh_month, f.savings_wh_month));

    const double deviation = std::fabs(e.total_wh_month - f.proposed_wh_month) /
                             f.proposed_wh_month;
    if (deviation > 0.05) {
        std::fprintf(stderr, "error: simulated monthly energy deviates %.1f%% (limit 5%%)\n",
                     deviation * 100.0);
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wsnlight — wireless sensor network lighting simulator"};
    app.require_subcommand(1);

    CommonOpts opts;

    CLI::App* run = app.add_subcommand("run", "Simulate a scenario, write trace and report");
    run->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)")->required();
    run->add_option("--trace-out", opts.trace_out, "Trace file path (default trace.tsv)");
    run->add_option("--report-out", opts.report_out, "Report file path (default report.txt)");
    run->add_option("--report-csv", opts.report_csv, "Also write the report as CSV");
    add_tuning_flags(run, opts);

    CLI::App* report = app.add_subcommand("report", "Simulate and print only the energy report");
    report->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)")->required();
    report->add_option("--report-out", opts.report_out, "Also write the report to a file");
    add_tuning_flags(report, opts);

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)")->required();

    bool baseline_only = false;
    CLI::App* table2 =
        app.add_subcommand("table2", "Reproduce the built-in five-lamp comparison");
    table2->add_flag("--baseline-only", baseline_only,
                     "Print only the normal-system arithmetic, no simulation");
    table2->add_option("--trace-out", opts.trace_out, "Write the run's trace");
    table2->add_option("--report-out", opts.report_out, "Write the run's report");
    add_tuning_flags(table2, opts);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(opts, true);
    if (report->parsed()) return cmd_report(opts);
    if (validate->parsed()) return cmd_validate(opts);
    if (table2->parsed()) return cmd_table2(opts, baseline_only);
    return kExitFailure;
}
