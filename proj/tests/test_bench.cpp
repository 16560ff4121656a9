#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mfaz/bench.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/scenarios.hpp"

using namespace mfaz;

TEST_CASE("fpr probe: empty filter never false-positives") {
    CHECK(run_fpr_probe(0, 5000, 1) == 0.0);
}

TEST_CASE("fpr probe: half load sits well below full load") {
    double half = run_fpr_probe(500, 20000, 5);
    double full = run_fpr_probe(1000, 20000, 5);
    CHECK(half < full);
    // theoretical half-load rate is ~2.5e-4; full load ~1e-2. The gap is far
    // beyond 3 sigma of the probe count, so < is a stable assertion.
    CHECK(half < 0.004);
    CHECK(full > 0.004);
}

TEST_CASE("bench report carries the seven phases and storage figures") {
    BenchReport report = run_bench(50);
    CHECK(report.runs == 50);
    REQUIRE(report.phases.size() == kBenchPhases.size());
    for (const char* phase : kBenchPhases) {
        REQUIRE(report.phases.count(phase) == 1);
        const PhaseStats& s = report.phases.at(phase);
        CHECK(s.mean_us > 0);
        CHECK(s.p95_us >= s.median_us);
    }
    // the generation total encloses computation, insertion and the store
    CHECK(report.phases.at("vp_generation_total").mean_us >=
          report.phases.at("vp_computation").mean_us +
              report.phases.at("vp_insertion").mean_us);
    CHECK(report.phases.at("vp_verification_total").mean_us >=
          report.phases.at("vp_checking").mean_us);

    CHECK(report.bf_bytes == 1255);
    CHECK(report.header_bytes == 56);
    CHECK(report.bitarray_bytes == 1199);
    CHECK(report.raw_vp_bytes_equivalent == 32000);

    std::string machine = machine_bench_report(report);
    for (const char* phase : kBenchPhases)
        CHECK(machine.find(std::string("name=") + phase) != std::string::npos);
    CHECK(machine.find("bench.storage") != std::string::npos);
}

TEST_CASE("bench refuses an undersized run count") {
    CHECK_THROWS_AS(run_bench(10), Error);
}

TEST_CASE("parallel grant chains complete without errors") {
    ParallelReport report = run_parallel_grants(4, 25);
    CHECK(report.grants == 4 * 25);
    CHECK(report.denies == 0);
    CHECK(report.errors == 0);
}

TEST_CASE("scenario DSL rejects malformed scripts") {
    CHECK_THROWS_AS(parse_scenarios("request alice read r private valid "
                                    "expect GRANTED OK\n"),
                    Error);  // outside scenario
    CHECK_THROWS_AS(parse_scenarios("scenario a\nscenario b\nend\n"), Error);
    CHECK_THROWS_AS(parse_scenarios("scenario a\nfrobnicate x\nend\n"), Error);
    CHECK_THROWS_AS(parse_scenarios("scenario a\n"), Error);  // unterminated
    CHECK_THROWS_AS(
        parse_scenarios("scenario a\nrequest alice read r private valid "
                        "expect MAYBE OK\nend\n"),
        Error);
}

TEST_CASE("a setup failure aborts only its own scenario") {
    const char* text =
        "scenario broken\n"
        "open_session ghost\n"  // never enrolled
        "end\n"
        "scenario fine\n"
        "rule *;read;public\n"
        "enroll alice\n"
        "open_session alice\n"
        "request alice read feed public valid expect GRANTED OK\n"
        "end\n";
    auto suite = parse_scenarios(text);
    REQUIRE(suite.size() == 2);
    ScenarioSuiteReport report = run_scenarios(suite);
    REQUIRE(report.results.size() == 2);
    CHECK(!report.results[0].pass);
    CHECK(report.results[0].detail.find("setup failure") != std::string::npos);
    CHECK(report.results[1].pass);
}

TEST_CASE("the shipped suite file matches the built-in suite") {
    std::ifstream in(std::string(MFAZ_SCENARIOS_DIR) + "/default.suite");
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();

    auto from_file = parse_scenarios(buf.str());
    auto built_in = parse_scenarios(default_scenario_suite());
    REQUIRE(from_file.size() == built_in.size());
    for (std::size_t i = 0; i < built_in.size(); ++i) {
        CHECK(from_file[i].name == built_in[i].name);
        CHECK(from_file[i].actions.size() == built_in[i].actions.size());
    }
    CHECK(run_scenarios(from_file).all_pass());
}

TEST_CASE("the shipped default suite holds: no false grants or denies") {
    auto suite = parse_scenarios(default_scenario_suite());
    CHECK(suite.size() == 8);
    ScenarioSuiteReport report = run_scenarios(suite);
    CHECK(report.all_pass());
    CHECK(report.false_grant_count == 0);
    CHECK(report.false_deny_count == 0);

    std::string formatted = format_scenario_report(report);
    CHECK(formatted.find("[PASS] hijack-with-dos") != std::string::npos);
    CHECK(formatted.find("false_grants=0") != std::string::npos);
}
