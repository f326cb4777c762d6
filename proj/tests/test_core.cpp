#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "railsim/core/config.hpp"
#include "railsim/core/experiment.hpp"
#include "railsim/core/metrics.hpp"
#include "railsim/core/rng.hpp"

using namespace railsim;

namespace {

struct RegisterOnce {
    RegisterOnce() { experiments::register_all(); }
};
const RegisterOnce register_once;

core::ScenarioConfig parse(const std::string& text) {
    return core::parse_scenario_text(text, "<test>");
}

}  // namespace

TEST_CASE("rng replay is bit-identical") {
    core::RngStream a(42, "stream");
    core::RngStream b(42, "stream");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng streams are independent of consumption order") {
    core::RngStream a1(7, "alpha");
    core::RngStream b1(7, "beta");
    // Interleaved consumption.
    std::vector<std::uint64_t> a_vals, b_vals;
    for (int i = 0; i < 100; ++i) {
        a_vals.push_back(a1.next_u64());
        b_vals.push_back(b1.next_u64());
    }
    // Sequential consumption.
    core::RngStream a2(7, "alpha");
    core::RngStream b2(7, "beta");
    for (int i = 0; i < 100; ++i) CHECK(a2.next_u64() == a_vals[i]);
    for (int i = 0; i < 100; ++i) CHECK(b2.next_u64() == b_vals[i]);
}

TEST_CASE("rng uniform moments") {
    core::RngStream s(1, "uniform");
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("rng complex normal is unit variance") {
    core::RngStream s(3, "cn");
    double power = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) power += std::norm(s.cnormal());
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("minimal scenario fills defaults") {
    const auto cfg = parse("scenario_name = ris_fig3\nseed = 9\n");
    CHECK(cfg.scenario_name == "ris_fig3");
    CHECK(cfg.seed == 9);
    CHECK(cfg.trials == 1);
    CHECK(cfg.get("channel.cluster_count") == doctest::Approx(3.0));
}

TEST_CASE("unit suffixes convert to SI") {
    const auto cfg = parse(
        "scenario_name = sched_fig18\n"
        "seed = 1\n"
        "sched.carrier = 340 GHz\n"
        "sched.qos_max = 500 Mbps\n"
        "sched.slot_len = 10 us\n");
    CHECK(cfg.get("sched.carrier") == doctest::Approx(3.4e11));
    CHECK(cfg.get("sched.qos_max") == doctest::Approx(5e8));
    CHECK(cfg.get("sched.slot_len") == doctest::Approx(1e-5));
}

TEST_CASE("trials = 0 is a validation error") {
    CHECK_THROWS_AS(parse("scenario_name = x\nseed = 1\ntrials = 0\n"),
                    core::ConfigError);
    try {
        parse("scenario_name = x\nseed = 1\ntrials = 0\n");
    } catch (const core::ConfigError& e) {
        CHECK(e.kind == core::ConfigError::Kind::Validation);
    }
}

TEST_CASE("unknown keys are rejected and named") {
    try {
        parse("scenario_name = x\nseed = 1\nnope.key = 3\n");
        FAIL("expected ConfigError");
    } catch (const core::ConfigError& e) {
        CHECK(std::string(e.what()).find("nope.key") != std::string::npos);
    }
}

TEST_CASE("malformed lines are parse errors with the line number") {
    try {
        parse("scenario_name = x\nseed = 1\nbroken line\n");
        FAIL("expected ConfigError");
    } catch (const core::ConfigError& e) {
        CHECK(e.kind == core::ConfigError::Kind::Parse);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("empty table writes a header-only csv") {
    core::MetricsTable table;
    table.columns = {"a", "b"};
    CHECK(table.to_csv() == "a,b\n");
}

TEST_CASE("three-row table gives a four-line csv") {
    core::MetricsTable table;
    table.columns = {"x"};
    table.append_row({1.0});
    table.append_row({2.5});
    table.append_row({-3.125});
    const std::string csv = table.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("tables with NaN are refused") {
    core::MetricsTable table;
    table.columns = {"x"};
    table.append_row({std::nan("")});
    CHECK_THROWS(core::write_table(table, "/tmp/railsim_nan.csv",
                                   core::TableFormat::Csv));
}

TEST_CASE("csv round-trips full precision") {
    core::MetricsTable table;
    table.columns = {"v"};
    const double value = 0.1 + 0.2;  // not exactly representable as 0.3
    table.append_row({value});
    const std::string csv = table.to_csv();
    const auto pos = csv.find('\n') + 1;
    const double back = std::stod(csv.substr(pos));
    CHECK(back == value);
}

TEST_CASE("unknown scenario name is rejected by run_scenario") {
    auto cfg = parse("scenario_name = no_such_thing\nseed = 1\n");
    CHECK_THROWS_AS(core::run_scenario(cfg), core::ConfigError);
}

TEST_CASE("identical configs give identical tables") {
    auto cfg = parse(
        "scenario_name = access_bimodal\nseed = 77\n"
        "access.bimodal_draws = 500\n");
    const auto t1 = core::run_scenario(cfg);
    const auto t2 = core::run_scenario(cfg);
    CHECK(t1.to_csv() == t2.to_csv());
}

TEST_CASE("sched_fig18 has the contract columns") {
    auto cfg = parse(
        "scenario_name = sched_fig18\nseed = 1\n"
        "sched.max_flows = 4\nsched.slot_count = 400\n");
    const auto table = core::run_scenario(cfg);
    REQUIRE(table.columns.size() == 4);
    CHECK(table.columns[0] == "num_flows");
    CHECK(table.columns[1] == "slots_proposed");
    CHECK(table.columns[2] == "slots_serial");
    CHECK(table.columns[3] == "slots_greedy");
}

TEST_CASE("multi-trial aggregation appends std/min/max columns") {
    auto cfg = parse(
        "scenario_name = access_bimodal\nseed = 5\ntrials = 3\n"
        "access.bimodal_draws = 200\n");
    const auto table = core::run_scenario(cfg);
    CHECK(table.column_index("frequency") >= 0);
    CHECK(table.column_index("frequency_std") >= 0);
    CHECK(table.column_index("frequency_min") >= 0);
    CHECK(table.column_index("frequency_max") >= 0);
}
