#include <fstream>
#include <sstream>

#include "doctest.h"

#include "wfsim/errors.hpp"
#include "wfsim/scenario.hpp"

using namespace wfsim;

namespace {

const std::filesystem::path kDir = WFSIM_SCENARIO_DIR;

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string with(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

std::string expect_invalid(const std::string& text) {
    try {
        parse_scenario(text, kDir);
    } catch (const ValidationError& e) {
        return std::string(e.subject());
    }
    FAIL("expected ValidationError");
    return {};
}

}  // namespace

TEST_CASE("scenario A parses") {
    const auto c = load_scenario_file(kDir / "scenario_a_448_cores.json");
    CHECK(c.name == "scenario-a-448-cores");
    CHECK(c.seed == 42);
    REQUIRE(c.pools.size() == 2);
    std::int64_t jobs_mc = 0;
    for (const auto& p : c.pools)
        if (p.pool == Pool::jobs) jobs_mc = p.node_count * p.node_capacity.millicores;
    CHECK(jobs_mc == 448000);
    CHECK(c.bind_delay_seconds == 5);
    CHECK(c.load.batch_size == 200);
    CHECK(c.load.batch_count == 6);
    CHECK(c.load.interval_seconds == 600);
    CHECK(c.load.workflow->steps.size() == 4);
    CHECK(c.load.workflow->orchestrator == Resources{100, 256});
    CHECK(c.arrival_rate() == doctest::Approx(1.0 / 3.0));
    CHECK(c.scheduler.retry_interval_seconds == 30);
    CHECK(c.saturation_window() == Window{1200, 3000});
    CHECK(c.steady_window() == Window{600, 3600});
}

TEST_CASE("every shipped scenario validates") {
    for (const auto& entry : std::filesystem::directory_iterator(kDir)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path());
        CHECK_NOTHROW(load_scenario_file(entry.path()));
    }
}

TEST_CASE("invalid scenarios name the offending field") {
    const std::string a = read(kDir / "scenario_a_448_cores.json");
    CHECK(expect_invalid(with(a, "\"batch_size\": 200", "\"batch_size\": 0")) == "load.batch_size");
    CHECK(expect_invalid(with(a, "\"horizon_seconds\": 14400", "\"horizon_seconds\": 3000")) == "horizon_seconds");
    CHECK(expect_invalid(with(a, "\"memory_headroom_fraction\": 0.9", "\"memory_headroom_fraction\": 0")) ==
          "scheduler.memory_headroom_fraction");
}

TEST_CASE("inline workflow specs and malformed documents") {
    const std::string inline_spec = R"({
      "name": "inline", "seed": 3,
      "cluster": {"pools": [
        {"name": "orchestration", "node_count": 1, "cores_millicores_per_node": 8000, "memory_mib_per_node": 16384},
        {"name": "jobs", "node_count": 2, "cores_millicores_per_node": 8000, "memory_mib_per_node": 16384}],
        "bind_delay_seconds": 1},
      "load": {"workflow_spec": {"name": "w", "steps": [{"id": "a", "cores_millicores": 500, "memory_mib": 100,
                "duration": {"kind": "fixed", "seconds": 3}}]},
               "batch_size": 2, "interval_seconds": 10, "batch_count": 4},
      "horizon_seconds": 100})";
    const auto c = parse_scenario(inline_spec);
    CHECK(c.load.workflow->steps.front().id == "a");
    CHECK(c.bind_delay_seconds == 1);
    CHECK(c.executor.termination_latency_seconds == 5);

    CHECK_THROWS_AS(parse_scenario("{ not json"), SyntaxError);
    CHECK_THROWS_AS(load_scenario_file(kDir / "does-not-exist.json"), Error);
}
