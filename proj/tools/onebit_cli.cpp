#include "onebit/benchmark.hpp"
#include "onebit/config.hpp"
#include "onebit/validation.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Options {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    int draws = 500;
    bool strict = false;
    bool timing = false;
};

int report(const std::vector<onebit::validation::CheckResult>& checks, bool strict) {
    std::cout << onebit::validation::format_checks(checks);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.passed();
    return (strict && !ok) ? 1 : 0;
}

int cmd_run(const Options& opt) {
    onebit::ExperimentConfig cfg = onebit::load_config(opt.config_path);
    if (opt.seed) cfg.scenario.seed = *opt.seed;
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.threads) cfg.threads = *opt.threads;
    if (opt.timing) cfg.timing = true;

    const onebit::ResultTable table = onebit::run(cfg);
    if (opt.out.empty() || opt.out == "-") {
        onebit::write_csv(table, std::cout);
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + opt.out);
        onebit::write_csv(table, f);
    }

    int failures = 0;
    for (const auto& r : table.rows) failures += r.failures;
    if (failures > 0) std::cerr << failures << " failed trial(s)\n";
    return (opt.strict && failures > 0) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-bit compressed sensing with side information"};
    app.require_subcommand(1);
    Options opt;

    auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment and write CSV");
    run->add_option("config", opt.config_path, "JSON experiment file")->required()->check(CLI::ExistingFile);
    run->add_option("--out,-o", opt.out, "CSV destination (default stdout)");
    run->add_option("--trials", opt.trials, "Override the trial count")->check(CLI::PositiveNumber);
    run->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timing", opt.timing, "Record wall-clock runtimes (output is then not reproducible)");

    auto* oracle = app.add_subcommand("oracle", "Check closed-form moments against quadrature");
    oracle->add_option("--draws", opt.draws, "Random parameter sets per formula")->check(CLI::PositiveNumber);

    auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");

    for (auto* sub : {run, oracle, selftest}) {
        sub->add_option("--seed", opt.seed, "Master seed");
        sub->add_flag("--strict", opt.strict, "Exit with status 1 on any failure");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        const std::uint64_t seed = opt.seed.value_or(1);
        if (oracle->parsed()) return report(onebit::validation::run_oracle_suite(seed, opt.draws), opt.strict);
        return report(onebit::validation::run_selftest(seed), opt.strict);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
