// SPDX-License-Identifier: Apache-2.0
//
// levylab CLI: run and validate experiment configs, or run a bundled demo.
//   levylab run <cfg>      execute the config's checks, write the report
//   levylab validate <cfg> static validation only, no sampling
//   levylab demo <name>    run a bundled experiment (theorem31, theorem41,
//                          corollary51, chaos)
// Flags: --workers N, --out DIR, --format json|csv, --parallel-checks.
// LEVYLAB_OUT overrides the output directory (and nothing else).
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "levylab/config.hpp"
#include "levylab/demo.hpp"
#include "levylab/errors.hpp"
#include "levylab/runner.hpp"
#include "levylab/version.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw levylab::Error("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw levylab::Error("cannot write " + path.string());
    out << content;
}

struct Options {
    int workers = 1;
    std::string out_dir = ".";
    std::string format = "json";
    bool parallel_checks = false;
};

int execute(const std::string& text, const std::string& stem,
            const Options& options) {
    using clock = std::chrono::steady_clock;

    levylab::ExperimentConfig config;
    auto diagnostics = levylab::validate_config(text, &config);
    if (!diagnostics.empty()) {
        for (const auto& d : diagnostics) std::cerr << "error: " << d << "\n";
        return 2;
    }

    levylab::RunOptions run_options;
    run_options.workers = options.workers;
    run_options.parallel_checks = options.parallel_checks;
    auto started = clock::now();
    levylab::RunResult result = levylab::run_config(config, run_options);
    double elapsed =
        std::chrono::duration<double>(clock::now() - started).count();

    for (const auto& check : result.report.checks) {
        std::printf("[%s] %s (%s)\n", check.pass ? "PASS" : "FAIL",
                    check.name.c_str(), check.kind.c_str());
        for (const auto& note : check.notes)
            std::printf("       note: %s\n", note.c_str());
    }

    fs::path out_dir(options.out_dir);
    fs::path report_path =
        out_dir / (stem + (options.format == "csv" ? ".report.csv"
                                                   : ".report.json"));
    write_file(report_path, options.format == "csv"
                                ? levylab::render_csv(result.report)
                                : levylab::render_json(result.report));
    for (const auto& [name, content] : result.artifacts)
        write_file(out_dir / name, content);

    std::size_t passed = 0;
    for (const auto& check : result.report.checks)
        if (check.pass) ++passed;
    std::printf("%zu/%zu checks passed; report: %s\n", passed,
                result.report.checks.size(), report_path.string().c_str());
    // wall time stays out of the report so reruns are byte-identical
    std::fprintf(stderr, "wall time: %.2fs\n", elapsed);
    return result.report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(levylab::kVersion) +
                 " - numerical checks for Malliavin smoothness weights on "
                 "the compound Poisson space"};
    app.require_subcommand(1);

    Options options;
    if (const char* env_out = std::getenv("LEVYLAB_OUT"))
        options.out_dir = env_out;

    auto add_common = [&options](CLI::App* cmd) {
        cmd->add_option("--workers", options.workers,
                        "worker threads per estimator")
            ->check(CLI::Range(1, 256));
        cmd->add_option("--out", options.out_dir, "output directory");
        cmd->add_option("--format", options.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_flag("--parallel-checks", options.parallel_checks,
                      "run checks concurrently (report order is unchanged)");
    };

    std::string config_path, demo_name;
    CLI::App* run = app.add_subcommand("run", "execute a config");
    run->add_option("config", config_path, "config file (JSON)")->required();
    add_common(run);

    CLI::App* validate =
        app.add_subcommand("validate", "static validation, no sampling");
    validate->add_option("config", config_path, "config file (JSON)")
        ->required();

    CLI::App* demo = app.add_subcommand("demo", "run a bundled experiment");
    demo->add_option("name", demo_name, "demo name")
        ->required()
        ->check(CLI::IsMember(levylab::demo_config_names()));
    add_common(demo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::string text = read_file(config_path);
            std::string stem = fs::path(config_path).stem().string();
            return execute(text, stem, options);
        }
        if (validate->parsed()) {
            std::string text = read_file(config_path);
            auto diagnostics = levylab::validate_config(text);
            for (const auto& d : diagnostics)
                std::cout << "error: " << d << "\n";
            if (diagnostics.empty()) std::cout << "config is valid\n";
            return diagnostics.empty() ? 0 : 2;
        }
        // demo: run the embedded copy and drop it next to the report
        const char* text = levylab::demo_config(demo_name);
        write_file(fs::path(options.out_dir) / (demo_name + ".cfg"),
                   std::string(text) + "\n");
        return execute(text, demo_name, options);
    } catch (const levylab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
