// Command-line front end for the qpma shared library. Talks to the simulator
// exclusively through the C API in qpma.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qpma.h"

namespace {

int exit_code_for(qpma_status status) {
    switch (status) {
    case QPMA_OK:
        return 0;
    case QPMA_ERR_PARSE:
        return 2;
    case QPMA_ERR_VALIDATION:
    case QPMA_ERR_GUARD:
        return 3;
    case QPMA_ERR_VERIFICATION:
        return 4;
    default:
        return 1;
    }
}

int fail(qpma_status status) {
    std::cerr << "error (" << qpma_status_name(status)
              << "): " << qpma_last_error() << "\n";
    return exit_code_for(status);
}

bool emit(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (out_path.empty()) {
        return true;
    }
    std::ofstream file(out_path, std::ios::binary);
    file << text;
    if (!file) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return false;
    }
    return true;
}

struct ScenarioHandle {
    qpma_scenario* ptr = nullptr;
    ~ScenarioHandle() { qpma_scenario_free(ptr); }
};

struct ReportHandle {
    qpma_report* ptr = nullptr;
    ~ReportHandle() { qpma_report_free(ptr); }
};

int run_scenario(const std::string& scenario_path, bool use_example,
                 std::optional<std::uint64_t> seed,
                 std::optional<bool> leader_encodes, std::optional<double> q,
                 std::optional<qpma_mode> required_mode,
                 const std::string& out_path) {
    ScenarioHandle scenario;
    qpma_status status = use_example
                             ? qpma_scenario_example(&scenario.ptr)
                             : qpma_scenario_load(scenario_path.c_str(),
                                                  &scenario.ptr);
    if (status != QPMA_OK) {
        return fail(status);
    }
    if (required_mode) {
        qpma_mode mode;
        qpma_scenario_mode(scenario.ptr, &mode);
        if (mode != *required_mode) {
            std::cerr << "error (validation error): scenario mode does not "
                         "match the subcommand\n";
            return 3;
        }
    }
    if (seed) {
        qpma_scenario_set_seed(scenario.ptr, *seed);
    }
    if (leader_encodes) {
        qpma_scenario_set_leader_encodes(scenario.ptr, *leader_encodes ? 1 : 0);
    }
    if (q) {
        status = qpma_scenario_set_membership_q(scenario.ptr, *q);
        if (status != QPMA_OK) {
            return fail(status);
        }
    }

    ReportHandle report;
    status = qpma_run(scenario.ptr, &report.ptr);
    if (status != QPMA_OK) {
        return fail(status);
    }
    char* text = nullptr;
    status = qpma_report_render(report.ptr, &text);
    if (status != QPMA_OK) {
        return fail(status);
    }
    const bool ok = emit(text, out_path);
    qpma_string_free(text);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpma: quantum private membership aggregation simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path;
    std::uint64_t seed = 0;
    bool leader_encodes = true;
    double q = 0.5;

    qpma_verify_options verify_options;
    qpma_verify_options_init(&verify_options);

    auto* run = app.add_subcommand(
        "run", "Run a membership aggregation scenario file");
    run->add_option("--scenario", scenario_path, "Scenario file path")
        ->required();
    auto* run_seed = run->add_option("--seed", seed, "Master seed override");
    auto* run_le =
        run->add_option("--leader-encodes", leader_encodes,
                        "Whether the leader encodes its own set (true/false)");
    auto* run_q = run->add_option(
        "--q", q, "Replace explicit sets with Bernoulli(q) membership");
    run->add_option("--out", out_path, "Also write the report to this file");

    auto* sum =
        app.add_subcommand("sum", "Run a summation-mode scenario file");
    sum->add_option("--scenario", scenario_path, "Scenario file path")
        ->required();
    auto* sum_seed = sum->add_option("--seed", seed, "Master seed override");
    sum->add_option("--out", out_path, "Also write the report to this file");

    auto* verify = app.add_subcommand(
        "verify", "Run the verification grid and report pass/fail");
    verify->add_option("--max-n", verify_options.max_parties,
                       "Largest party count in the grid");
    verify->add_option("--max-k", verify_options.max_blocks,
                       "Largest element count in the grid");
    verify->add_option("--max-p", verify_options.max_prime,
                       "Largest prime in the grid");
    verify->add_option("--trials", verify_options.trials,
                       "Sampling trials for tamper experiments");
    verify->add_option("--seed", verify_options.seed, "Grid seed");
    verify->add_option("--out", out_path, "Also write the table to this file");

    auto* example = app.add_subcommand(
        "example", "Replay the bundled three-party worked example");
    auto* example_seed =
        example->add_option("--seed", seed, "Master seed override");
    example->add_option("--out", out_path, "Also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        return run_scenario(
            scenario_path, false,
            run_seed->count() ? std::optional<std::uint64_t>(seed)
                              : std::nullopt,
            run_le->count() ? std::optional<bool>(leader_encodes)
                            : std::nullopt,
            run_q->count() ? std::optional<double>(q) : std::nullopt,
            QPMA_MODE_MEMBERSHIP, out_path);
    }
    if (sum->parsed()) {
        return run_scenario(scenario_path, false,
                            sum_seed->count()
                                ? std::optional<std::uint64_t>(seed)
                                : std::nullopt,
                            std::nullopt, std::nullopt, QPMA_MODE_SUMMATION,
                            out_path);
    }
    if (example->parsed()) {
        return run_scenario(scenario_path, true,
                            example_seed->count()
                                ? std::optional<std::uint64_t>(seed)
                                : std::nullopt,
                            std::nullopt, std::nullopt, std::nullopt,
                            out_path);
    }

    char* table = nullptr;
    int all_passed = 0;
    const qpma_status status = qpma_verify(&verify_options, &table,
                                           &all_passed);
    if (table) {
        const bool ok = emit(table, out_path);
        qpma_string_free(table);
        if (!ok) {
            return 1;
        }
    }
    if (status != QPMA_OK && status != QPMA_ERR_VERIFICATION) {
        return fail(status);
    }
    return all_passed ? 0 : 4;
}
