#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fwss/bench.hpp"

using namespace fwss;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.n = 12;
    spec.ks = {2};
    spec.dms = {2.0};
    spec.trials = 3;
    spec.seed = 5;
    spec.record_timing = false;
    return spec;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("modulus_for") {
    CHECK(modulus_for(24, 2.0) == 4096);
    CHECK(modulus_for(24, 1.5) == 65536);
    CHECK(modulus_for(24, 4.0) == 64);
    CHECK(modulus_for(12, 2.0) == 64);
    CHECK_THROWS_AS(modulus_for(12, 20.0), ParameterError);
    CHECK_THROWS_AS(modulus_for(12, 0.0), InputError);
}

TEST_CASE("expected column uses the closed form") {
    auto spec = small_spec();
    spec.dms = {1.5, 2.0, 4.0};
    spec.trials = 1;
    auto rows = run_no_experiment(spec);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].expected_no == doctest::Approx(4096.0 / 256));
    CHECK(rows[1].expected_no == doctest::Approx(64));
    CHECK(rows[2].expected_no == doctest::Approx(512));
    CHECK(rows[1].m == 64);

    ExperimentSpec fixed = small_spec();
    fixed.mode = ListMode::fixed_weight;
    fixed.ell = 6;
    fixed.trials = 1;
    auto frows = run_no_experiment(fixed);
    CHECK(frows[0].expected_no == doctest::Approx(924.0 / 64));
}

TEST_CASE("rows hold per-trial records") {
    auto rows = run_success_experiment(small_spec());
    REQUIRE(rows.size() == 1);
    const auto& row = rows[0];
    CHECK(row.trials_requested == 3);
    CHECK(row.records.size() == 3);
    CHECK(row.trials <= 3);
    CHECK(row.success_pct >= 0);
    CHECK(row.success_pct <= 100);
    CHECK(row.complete);
    std::size_t solved = 0;
    for (const auto& r : row.records) solved += r.solved;
    CHECK(solved == row.trials);
    if (row.trials) CHECK(row.geo_mean_no <= row.mean_no + 1e-9);
}

TEST_CASE("csv output") {
    auto spec = small_spec();
    auto path = std::filesystem::temp_directory_path() / "fwss_bench_test.csv";
    auto rows = run_no_experiment(spec);
    write_csv(rows, path);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    auto lines = lines_of(text.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "k,d_m,mean_No,expected_No,success_pct,mean_time_s,trials");
    CHECK(lines[1].rfind("2,2,", 0) == 0);
    CHECK(text.str().back() == '\n');
    std::filesystem::remove(path);

    // Same seed, same bytes.
    CHECK(format_csv(run_no_experiment(spec), spec_metadata(spec)) ==
          format_csv(run_no_experiment(spec), spec_metadata(spec)));

    auto grid = spec;
    grid.ks = {2, 4, 8};
    grid.dms = {1.0, 1.5, 2.0};
    grid.n = 16;
    grid.trials = 1;
    auto grid_rows = run_no_experiment(grid);
    CHECK(lines_of(format_csv(grid_rows)).size() == 10);

    auto with_meta = lines_of(format_csv(rows, spec_metadata(spec)));
    CHECK(with_meta.front().rfind("# ", 0) == 0);
    CHECK(with_meta.back().rfind("2,2,", 0) == 0);

    CHECK_THROWS_AS(write_csv(rows, "/nonexistent/dir/out.csv"), ResourceError);
    CHECK_THROWS_AS(write_csv({}, path), InputError);
}

TEST_CASE("observer sees every trial") {
    auto spec = small_spec();
    int calls = 0;
    run_no_experiment(spec, [&](const ExperimentRow&, const TrialRecord& record, const Instance& inst,
                                const KsetReport& report) {
        ++calls;
        CHECK(inst.n() == 12);
        CHECK(record.oracle_successes == report.oracle_successes);
        if (report.solution) CHECK(is_subset_sum_solution(inst, *report.solution));
    });
    CHECK(calls == 3);
}

TEST_CASE("cell budget marks rows incomplete") {
    auto spec = small_spec();
    spec.n = 20;
    spec.dms = {1.0};
    spec.trials = 50;
    spec.cell_budget_s = 1e-6;
    auto rows = run_no_experiment(spec);
    CHECK_FALSE(rows[0].complete);
    CHECK(rows[0].records.size() < 50);
}
