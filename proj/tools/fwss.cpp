// fwss: generate, solve, benchmark and verify fixed-weight subset sum instances.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fwss/bench.hpp"
#include "fwss/core.hpp"
#include "fwss/instance_io.hpp"
#include "fwss/kset.hpp"
#include "fwss/splitting.hpp"
#include "fwss/ss4.hpp"

namespace {

enum Exit { kOk = 0, kNoSolution = 1, kUsage = 2, kResource = 3 };

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("fwss");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FWSS_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

fwss::ListMode parse_mode(const std::string& s) {
    return s == "unrestricted" ? fwss::ListMode::unrestricted : fwss::ListMode::fixed_weight;
}

fwss::ValidationMode parse_validation(const std::string& s) {
    return s == "strict" ? fwss::ValidationMode::strict : fwss::ValidationMode::experimental;
}

void print(const nlohmann::json& doc) { std::cout << doc.dump(2) << '\n'; }

struct GenArgs {
    std::size_t n = 24;
    std::size_t ell = 12;
    double density = 0.9;
    std::uint64_t seed = 0;
    std::string mode = "fixed";
    bool unplanted = false;
    std::string out;
};

int run_gen(const GenArgs& args) {
    fwss::Rng rng(args.seed);
    const fwss::Instance instance = args.mode == "unrestricted"
                                        ? fwss::gen_unrestricted_instance(args.n, args.density, rng)
                                        : fwss::gen_instance(args.n, args.ell, args.density, rng, !args.unplanted);
    if (args.out.empty()) {
        std::cout << fwss::instance_to_json(instance).dump() << '\n';
    } else {
        fwss::write_instance_file(args.out, instance);
    }
    return kOk;
}

struct SolveArgs {
    std::string instance;
    std::string algo = "kset";
    std::size_t k = 4;
    std::optional<unsigned> m_bits;
    std::optional<double> dm;
    std::string m;
    double alpha = 4.0;
    std::size_t cap_factor = 8;
    std::uint64_t max_iters = 0;
    std::size_t workers = 1;
    std::string mode = "fixed";
    std::string validation = "experimental";
    std::uint64_t seed = 0;
    std::string division = "deterministic";
    std::uint64_t max_divisions = 0;
    double time_budget = 0;
    bool no_complement = false;
    bool trace = false;
};

std::int64_t pick_modulus(const SolveArgs& args, std::size_t n) {
    const int given = (args.m_bits ? 1 : 0) + (args.dm ? 1 : 0) + (args.m.empty() ? 0 : 1);
    if (given != 1) throw fwss::InputError("kset needs exactly one of --m-bits, --dm, --m");
    if (args.m_bits) {
        if (*args.m_bits < 1 || *args.m_bits > 62) throw fwss::InputError("--m-bits must lie in [1, 62]");
        return std::int64_t{1} << *args.m_bits;
    }
    if (args.dm) return fwss::modulus_for(n, *args.dm);
    const fwss::BigInt m = fwss::parse_decimal(args.m);
    if (m < 2 || m > fwss::kMaxModulus) throw fwss::InputError("--m must lie in [2, 2^62]");
    return m.convert_to<std::int64_t>();
}

int run_solve(const SolveArgs& args) {
    const fwss::Instance instance = fwss::read_instance_file(args.instance);

    if (args.algo == "brute") {
        auto x = fwss::brute_force(instance);
        nlohmann::json doc = {{"algorithm", "brute"}, {"solution", nullptr}};
        if (x) {
            if (!fwss::is_solution(instance, *x)) throw std::logic_error("brute force returned a non-solution");
            doc["solution"] = x->to_string();
        }
        print(doc);
        return x ? kOk : kNoSolution;
    }

    if (args.algo == "ss4" || args.algo == "mitm2") {
        const std::size_t k = args.algo == "ss4" ? 4 : 2;
        const fwss::SplitParams params(instance.n(), instance.ell(), k);
        std::unique_ptr<fwss::DivisionSource> source;
        if (args.division == "random") {
            source = std::make_unique<fwss::RandomSource>(params, fwss::Rng(args.seed));
        } else {
            source = std::make_unique<fwss::DeterministicSource>(params);
        }
        fwss::SolveLimits limits;
        limits.max_divisions = args.max_divisions;
        limits.time_budget_s = args.time_budget;
        auto with_echo = [&](const fwss::SolveReport& report) {
            auto doc = fwss::report_to_json(report);
            doc["params"] = {{"n", instance.n()}, {"ell", instance.ell()}, {"k", k}, {"division", args.division},
                             {"max_divisions", args.max_divisions}, {"time_budget_s", args.time_budget}};
            doc["seed"] = args.seed;
            return doc;
        };
        fwss::SolveReport report;
        try {
            report = args.algo == "ss4" ? fwss::solve_ss4(instance, *source, limits)
                                        : fwss::solve_mitm2(instance, *source, limits);
        } catch (const fwss::LimitExceeded& e) {
            auto doc = with_echo(e.partial());
            doc["error"] = e.what();
            print(doc);
            throw;
        }
        if (report.solution && !fwss::is_solution(instance, *report.solution)) {
            throw std::logic_error("solver returned a non-solution");
        }
        print(with_echo(report));
        return report.solution ? kOk : kNoSolution;
    }

    fwss::KsetConfig config;
    config.k = args.k;
    config.m = pick_modulus(args, instance.n());
    config.alpha = args.alpha;
    config.cap_factor = args.cap_factor;
    config.max_iterations = args.max_iters;
    config.workers = args.workers;
    config.mode = parse_mode(args.mode);
    config.validation = parse_validation(args.validation);
    config.complement = !args.no_complement;
    config.time_budget_s = args.time_budget;
    config.record_trace = args.trace;
    auto report = fwss::solve_kset_parallel(instance, config, fwss::Rng(args.seed));
    if (report.solution) {
        const bool ok = config.mode == fwss::ListMode::fixed_weight
                            ? fwss::is_solution(instance, *report.solution)
                            : fwss::is_subset_sum_solution(instance, *report.solution);
        if (!ok) throw std::logic_error("kset returned a non-solution");
    }
    print(fwss::kset_report_to_json(report, config));
    return report.solution ? kOk : kNoSolution;
}

struct BenchArgs {
    fwss::ExperimentSpec spec;
    std::optional<std::size_t> ell;
    std::string mode = "unrestricted";
    std::string validation = "experimental";
    bool fixed_weight = false;
    bool no_timing = false;
    bool no_metadata = false;
    std::string out;
};

int run_bench(BenchArgs args) {
    auto& spec = args.spec;
    spec.mode = args.fixed_weight ? fwss::ListMode::fixed_weight : parse_mode(args.mode);
    spec.validation = parse_validation(args.validation);
    spec.ell = args.ell;
    spec.record_timing = !args.no_timing;
    const auto rows = fwss::run_no_experiment(spec);
    const auto meta = args.no_metadata ? fwss::CsvMetadata{} : fwss::spec_metadata(spec);
    if (args.out.empty()) {
        std::cout << fwss::format_csv(rows, meta);
    } else {
        fwss::write_csv(rows, args.out, meta);
    }
    for (const auto& row : rows) {
        if (!row.complete) spdlog::warn("cell k={} d_m={} stopped after {} trials", row.k, row.d_m, row.trials);
    }
    return kOk;
}

struct VerifyArgs {
    std::string instance;
    std::string solution;
    bool unrestricted = false;
};

int run_verify(const VerifyArgs& args) {
    const fwss::Instance instance = fwss::read_instance_file(args.instance);
    const auto x = fwss::BitVector::from_string(args.solution);
    if (x.size() != instance.n()) {
        std::cout << "invalid: length " << x.size() << " does not match n = " << instance.n() << '\n';
        return kNoSolution;
    }
    const bool ok = args.unrestricted ? fwss::is_subset_sum_solution(instance, x) : fwss::is_solution(instance, x);
    std::cout << (ok ? "valid" : "invalid") << '\n';
    return ok ? kOk : kNoSolution;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Fixed-weight subset sum solver toolkit"};
    app.require_subcommand(1);
    const auto modes = CLI::IsMember({"fixed", "unrestricted"});
    const auto validations = CLI::IsMember({"strict", "experimental"});

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a random instance");
    gen_cmd->add_option("--n", gen.n, "Number of weights")->capture_default_str();
    gen_cmd->add_option("--ell", gen.ell, "Solution weight")->capture_default_str();
    gen_cmd->add_option("--density", gen.density, "n / log2 max a")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("--mode", gen.mode)->check(modes)->capture_default_str();
    gen_cmd->add_flag("--unplanted", gen.unplanted, "Random target instead of a planted solution");
    gen_cmd->add_option("--out", gen.out, "Instance file (default: stdout)");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file and print a JSON report");
    solve_cmd->add_option("instance", solve.instance, "Instance file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--algo", solve.algo)
        ->check(CLI::IsMember({"brute", "mitm2", "ss4", "kset"}))
        ->capture_default_str();
    solve_cmd->add_option("--k", solve.k, "kset list count")->capture_default_str();
    solve_cmd->add_option("--m-bits", solve.m_bits, "Modulus 2^bits");
    solve_cmd->add_option("--dm", solve.dm, "Modular density; modulus 2^floor(n/dm)");
    solve_cmd->add_option("--m", solve.m, "Explicit modulus");
    solve_cmd->add_option("--alpha", solve.alpha, "List oversize factor")->capture_default_str();
    solve_cmd->add_option("--cap-factor", solve.cap_factor, "Merge output cap in units of N (0: none)")
        ->capture_default_str();
    solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration budget (0: automatic)")->capture_default_str();
    solve_cmd->add_option("--workers", solve.workers)->check(CLI::PositiveNumber)->capture_default_str();
    solve_cmd->add_option("--mode", solve.mode)->check(modes)->capture_default_str();
    solve_cmd->add_option("--validation", solve.validation)->check(validations)->capture_default_str();
    solve_cmd->add_option("--seed", solve.seed)->capture_default_str();
    solve_cmd->add_option("--division", solve.division, "ss4/mitm2 division stream")
        ->check(CLI::IsMember({"deterministic", "random"}))
        ->capture_default_str();
    solve_cmd->add_option("--max-divisions", solve.max_divisions, "ss4/mitm2 division budget");
    solve_cmd->add_option("--time-budget", solve.time_budget, "Seconds (0: unlimited)");
    solve_cmd->add_flag("--no-complement", solve.no_complement, "Do not complement when ell > n/2");
    solve_cmd->add_flag("--trace", solve.trace, "Include oracle level sizes in the report");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run the N_o / success-rate experiment grid and write CSV");
    bench_cmd->add_option("--n", bench.spec.n)->capture_default_str();
    bench_cmd->add_option("--ell", bench.ell, "Solution weight in fixed mode (default n/2)");
    bench_cmd->add_option("--density", bench.spec.density)->capture_default_str();
    bench_cmd->add_option("--k", bench.spec.ks, "List counts")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--dm", bench.spec.dms, "Modular densities")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--trials", bench.spec.trials)->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--seed", bench.spec.seed)->capture_default_str();
    bench_cmd->add_option("--mode", bench.mode)->check(modes)->capture_default_str();
    bench_cmd->add_flag("--fixed-weight", bench.fixed_weight, "Same as --mode fixed");
    bench_cmd->add_option("--validation", bench.validation)->check(validations)->capture_default_str();
    bench_cmd->add_option("--alpha", bench.spec.alpha)->capture_default_str();
    bench_cmd->add_option("--cap-factor", bench.spec.cap_factor)->capture_default_str();
    bench_cmd->add_option("--max-iters", bench.spec.max_iterations)->capture_default_str();
    bench_cmd->add_option("--workers", bench.spec.workers)->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--cell-budget", bench.spec.cell_budget_s, "Seconds per cell (0: unlimited)")
        ->capture_default_str();
    bench_cmd->add_flag("--parallel-cells", bench.spec.parallel_cells, "Run cells concurrently");
    bench_cmd->add_flag("--no-timing", bench.no_timing, "Write 0 for times (byte-identical reruns)");
    bench_cmd->add_flag("--no-metadata", bench.no_metadata, "Omit the '#' parameter lines");
    bench_cmd->add_option("--out", bench.out, "CSV file (default: stdout)");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check a bit string against an instance");
    verify_cmd->add_option("instance", verify.instance)->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("solution", verify.solution, "Bit string x_1..x_n")->required();
    verify_cmd->add_flag("--unrestricted", verify.unrestricted, "Ignore the Hamming weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*solve_cmd) return run_solve(solve);
        if (*bench_cmd) return run_bench(bench);
        if (*verify_cmd) return run_verify(verify);
    } catch (const fwss::ResourceError& e) {
        spdlog::error("{}", e.what());
        return kResource;
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        spdlog::critical("internal error: {}", e.what());
        return kResource;
    }
    return kUsage;
}
