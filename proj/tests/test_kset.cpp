#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fwss/kset.hpp"

using namespace fwss;

namespace {

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
    for (const auto& l : lines) {
        if (l.find(needle) != std::string::npos) return true;
    }
    return false;
}

KsetConfig experimental(std::size_t k, std::int64_t m) {
    KsetConfig c;
    c.k = k;
    c.m = m;
    c.validation = ValidationMode::experimental;
    return c;
}

}  // namespace

TEST_CASE("validate_params") {
    KsetConfig c;
    c.k = 4;
    c.m = 256;
    auto bad = validate_params(32, 16, c);
    CHECK_FALSE(bad.ok);
    CHECK(mentions(bad.errors, "m < C(8,4) fails: m = 256, C(8,4) = 70"));

    c.m = 600;
    auto good = validate_params(48, 24, c);
    CHECK(good.ok);
    CHECK(good.errors.empty());

    KsetConfig c8;
    c8.k = 8;
    c8.m = std::int64_t{1} << 17;
    auto low = validate_params(160, 80, c8);  // C(20,10) = 184756 > m
    CHECK_FALSE(low.ok);
    CHECK(low.errors.size() == 1);
    CHECK(mentions(low.errors, "log2 m >= 2 (log2 k)^2 fails"));

    auto relaxed = validate_params(32, 16, experimental(4, 256));
    CHECK(relaxed.ok);
    CHECK(mentions(relaxed.warnings, "m < C(8,4) fails"));

    KsetConfig odd = c;
    odd.k = 6;
    CHECK_FALSE(validate_params(48, 24, odd).ok);
    KsetConfig tiny = c;
    tiny.m = 1;
    CHECK_FALSE(validate_params(48, 24, tiny).ok);

    auto doc = bad.to_json();
    CHECK(doc["ok"] == false);
    CHECK(doc["errors"].size() == bad.errors.size());
}

TEST_CASE("expected oracle successes") {
    CHECK(expected_oracle_successes(24, 12, 4096, ListMode::fixed_weight) ==
          doctest::Approx(2704156.0 / 4096));
    CHECK(expected_oracle_successes(24, 0, 1 << 16, ListMode::unrestricted) == doctest::Approx(256));
    CHECK(expected_oracle_successes(24, 0, 1 << 12, ListMode::unrestricted) == doctest::Approx(4096));
}

TEST_CASE("planted fixed-weight solve") {
    Rng rng(7);
    Instance inst = gen_instance(24, 12, 0.9, rng, true);
    auto report = solve_kset(inst, experimental(4, 1 << 12), Rng(11));
    REQUIRE(report.solution.has_value());
    CHECK(is_solution(inst, *report.solution));
    CHECK(report.stop_reason == "solved");
    CHECK(report.oracle_successes >= 1);
    CHECK(report.oracle_successes <= report.iterations);
    CHECK(report.divisions_sampled == report.iterations);
    CHECK(report.expected_no == doctest::Approx(2704156.0 / 4096));
    CHECK(mentions(report.warnings, "m < C(6,3) fails"));
}

TEST_CASE("strict validation refuses to run") {
    Rng rng(7);
    Instance inst = gen_instance(24, 12, 0.9, rng, true);
    KsetConfig c;
    c.m = 1 << 12;
    CHECK_THROWS_AS(solve_kset(inst, c, Rng(1)), ParameterError);
}

TEST_CASE("complement path") {
    Rng rng(9);
    Instance inst = gen_instance(24, 18, 0.9, rng, true);
    auto c = experimental(4, 1 << 10);
    std::uint64_t seen = 0;
    c.on_oracle_success = [&](const BitVector& x) {
        ++seen;
        CHECK(x.weight() == 18);
        CHECK((evaluate(inst, x) - inst.target()) % 1024 == 0);
    };
    auto report = solve_kset(inst, c, Rng(2));
    CHECK(seen == report.oracle_successes);
    CHECK(report.complemented);
    REQUIRE(report.solution.has_value());
    CHECK(report.solution->weight() == 18);
    CHECK(is_solution(inst, *report.solution));
}

TEST_CASE("iteration limit on an infeasible instance") {
    Rng rng(3);
    Instance planted = gen_instance(24, 12, 0.9, rng, true);
    Instance inst(planted.weights(), planted.total() + 1, 12);
    auto c = experimental(4, 1 << 12);
    c.max_iterations = 200;
    auto report = solve_kset(inst, c, Rng(4));
    CHECK_FALSE(report.solution.has_value());
    CHECK(report.stop_reason == "iteration_limit");
    CHECK(report.iterations == 200);

    // The automatic budget also terminates.
    c.max_iterations = 0;
    c.m = 1 << 8;
    auto automatic = solve_kset(inst, c, Rng(4));
    CHECK_FALSE(automatic.solution.has_value());
    CHECK(automatic.iteration_limit > 0);
}

TEST_CASE("unrestricted N_o lands near 2^n / m") {
    Rng rng(15);
    const std::int64_t m = 1 << 16;
    auto c = experimental(2, m);
    c.mode = ListMode::unrestricted;
    double log_sum = 0;
    const int runs = 10;
    for (int r = 0; r < runs; ++r) {
        Instance inst = gen_unrestricted_instance(24, 0.9, rng);
        auto report = solve_kset(inst, c, rng.split(r));
        REQUIRE(report.solution.has_value());
        CHECK(is_subset_sum_solution(inst, *report.solution));
        log_sum += std::log(static_cast<double>(report.oracle_successes));
    }
    const double geo = std::exp(log_sum / runs);
    CHECK(geo > 256.0 / 4);
    CHECK(geo < 256.0 * 4);
}

TEST_CASE("one worker is the serial solver") {
    Rng rng(21);
    Instance inst = gen_instance(24, 12, 0.9, rng, true);
    auto c = experimental(4, 1 << 12);
    auto serial = solve_kset(inst, c, Rng(5, 3));
    c.workers = 1;
    auto parallel = solve_kset_parallel(inst, c, Rng(5, 3));
    REQUIRE(serial.solution.has_value());
    REQUIRE(parallel.solution.has_value());
    CHECK(*serial.solution == *parallel.solution);
    CHECK(serial.iterations == parallel.iterations);
    CHECK(serial.oracle_successes == parallel.oracle_successes);
}

TEST_CASE("four workers") {
    Rng rng(31);
    auto c = experimental(4, 1 << 12);
    double serial_total = 0, per_worker_total = 0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        Instance inst = gen_instance(24, 12, 0.9, rng, true);
        auto serial = solve_kset(inst, c, rng.split(1000 + r));
        auto pc = c;
        pc.workers = 4;
        auto report = solve_kset_parallel(inst, pc, rng.split(r));
        REQUIRE(report.solution.has_value());
        CHECK(is_solution(inst, *report.solution));
        REQUIRE(report.worker_iterations.size() == 4);
        REQUIRE(report.worker_iterations_at_win.size() == 4);
        // After the win, at most the in-flight iteration finishes.
        for (std::size_t w = 0; w < 4; ++w) {
            CHECK(report.worker_iterations[w] >= report.worker_iterations_at_win[w]);
            CHECK(report.worker_iterations[w] - report.worker_iterations_at_win[w] <= 1);
        }
        CHECK(std::accumulate(report.worker_iterations.begin(), report.worker_iterations.end(), std::uint64_t{0}) ==
              report.iterations);
        serial_total += static_cast<double>(serial.iterations);
        per_worker_total += static_cast<double>(report.iterations) / 4;
    }
    // Each worker needs about a quarter of the serial iterations.  Both sums
    // cover 20 geometric-like counts (relative sd near 0.22 each, so about
    // 0.31 for the ratio).
    const double ratio = per_worker_total / serial_total;
    MESSAGE("per-worker / serial iterations: " << ratio);
    CHECK(ratio > 0.25 * (1 - 3 * 0.31));
    CHECK(ratio < 0.25 * (1 + 3 * 0.31));
}

TEST_CASE("report json") {
    Rng rng(7);
    Instance inst = gen_instance(24, 12, 0.9, rng, true);
    auto c = experimental(4, 1 << 12);
    c.record_trace = true;
    auto report = solve_kset(inst, c, Rng(11, 2));
    auto doc = kset_report_to_json(report, c);
    CHECK(doc["counters"].contains("N_o"));
    CHECK(doc["counters"]["N_o"] == report.oracle_successes);
    CHECK(doc["seed"] == 11);
    CHECK(doc["stream"] == 2);
    CHECK(doc["params"]["k"] == 4);
    CHECK(doc["params"]["m"] == 4096);
    CHECK(doc["solution"] == report.solution->to_string());
    CHECK(doc.contains("trace"));
    CHECK(to_string(ListMode::unrestricted) == "unrestricted");
    CHECK(to_string(ValidationMode::strict) == "strict");
}
