#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/metrics.hpp"
#include "wfsim/simulation.hpp"

namespace wfsim {

/// Exit codes of `simulate`.
enum ExitCode : int { exit_sustainable = 0, exit_error = 1, exit_overloaded = 3, exit_failed_runs = 4 };

struct ScenarioReport {
    std::string scenario;
    std::optional<Verdict> verdict;  // empty when there are fewer than 4 batches
    std::vector<RunMetrics> runs;
    std::vector<BatchWaitStats> batches;
    Window saturation_window{};
    double saturation_utilization = 0;
    double required_core_capacity_mc = 0;
    std::int64_t supplied_jobs_mc = 0;
    std::optional<LittlesLaw> littles_law;
    std::size_t submitted = 0, queued = 0, running = 0, finished = 0, failed = 0;
    std::size_t events = 0;
    std::size_t invariant_violations = 0;
    std::uint64_t status_published = 0, status_consumed = 0;

    /// Overloaded -> 3; otherwise any FAILED run -> 4; otherwise 0.
    int exit_code() const;
};

ScenarioReport analyze(const Simulation& sim);

/// Human-readable summary.txt contents.
std::string format_summary(const ScenarioReport& report);

void write_runs_csv(std::ostream& out, const std::vector<WorkflowRun>& runs);
void write_pods_csv(std::ostream& out, const ClusterState& cluster);
/// Periodic per-node rows plus pool aggregate rows (node_id "ALL") after
/// every allocation change, merged in time order.
void write_utilization_csv(std::ostream& out, const Simulation& sim);
void write_events_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Writes runs.csv, pods.csv, utilization.csv, events.csv and summary.txt.
void write_outputs(const Simulation& sim, const ScenarioReport& report, const std::filesystem::path& out_dir);

/// Simulates, analyzes and writes every output. Returns the exit code.
int run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// "%.3f" formatting used by every export.
std::string format_seconds(double s);

}  // namespace wfsim
