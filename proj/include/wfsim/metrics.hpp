#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/workflow_model.hpp"

namespace wfsim {

struct RunMetrics {
    std::string run_id;
    int batch_index = 0;
    Seconds scheduling_wait_s = 0;
    Seconds run_time_s = 0;  // 0 unless FINISHED
    RunState state = RunState::queued;
    /// Still QUEUED at the horizon: the wait is a lower bound (horizon - submitted).
    bool wait_censored = false;
};

/// Per-run measurements at `horizon`. Runs that failed in the queue report
/// their age at failure as the wait.
std::vector<RunMetrics> collect_run_metrics(std::span<const WorkflowRun> runs, Seconds horizon);

struct BatchWaitStats {
    int batch_index = 0;
    std::size_t runs = 0;
    Seconds median_wait_s = 0;
    Seconds p95_wait_s = 0;
};

/// Mean of the central pair for even sizes. Throws EmptyBatch on empty input.
double median(std::vector<double> values);

/// Nearest-rank percentile, p in (0, 100]. Throws EmptyBatch on empty input.
double percentile_nearest_rank(std::vector<double> values, double p);

/// Per-batch median and p95 wait in ascending batch order. Every batch index
/// between the smallest and largest present must have runs (EmptyBatch).
std::vector<BatchWaitStats> batch_wait_series(std::span<const RunMetrics> runs);

double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

enum class Verdict { sustainable, overloaded };

std::string_view to_string(Verdict v);

struct OverflowCriterion {
    double slope_threshold = 10.0;  // seconds of median wait per batch
    double growth_factor = 2.0;     // final median vs first median
};

/// Overloaded iff the least-squares slope of median wait against batch index
/// over the last ceil(n/2) batches exceeds the threshold AND the final median
/// is at least growth_factor times the first. Throws TooFewBatches below 4.
Verdict detect_overflow(std::span<const double> medians, const OverflowCriterion& criterion = {});

/// Mean makespan of one run: critical path of mean durations plus one bind
/// delay per DAG level.
Seconds expected_makespan(const WorkflowSpec& spec, Seconds bind_delay_seconds);

/// Steady-state mean core demand in millicores (Little's law):
/// rate * (sum(step cores * mean duration) + orchestrator cores * makespan).
double required_core_capacity(const WorkflowSpec& spec, double arrival_rate_per_second, Seconds bind_delay_seconds);

struct LittlesLaw {
    double mean_in_system = 0;    // L: time-averaged RUNNING count
    double throughput = 0;        // lambda: completions per second
    double mean_residence_s = 0;  // W: mean (finished - accepted)
    std::size_t completions = 0;
    double relative_error = 0;    // |L - lambda W| / L
};

/// Little's-law cross-check over [window_start, window_end]. Refuses
/// Overloaded windows (PreconditionViolated) and windows with fewer than 10
/// completions (WindowTooShort).
LittlesLaw littles_law_check(std::span<const WorkflowRun> runs, Seconds window_start, Seconds window_end,
                             Verdict verdict);

/// Time-averaged allocated-core fraction of `pool` over [t0, t1], integrated
/// exactly from the cluster's allocation change log.
double mean_core_utilization(const ClusterState& cluster, Pool pool, Seconds t0, Seconds t1);

}  // namespace wfsim
