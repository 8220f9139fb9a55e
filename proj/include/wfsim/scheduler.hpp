#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/sim_clock.hpp"
#include "wfsim/workflow_model.hpp"

namespace wfsim {

enum class RunState { queued, running, finished, failed };

std::string_view to_string(RunState s);

struct WorkflowRun {
    std::string run_id;
    std::shared_ptr<const WorkflowSpec> spec;
    Resources peak_demand;  // cached peak_parallel_demand(*spec)
    int batch_index = 0;
    RunState state = RunState::queued;
    std::optional<Seconds> submitted_at, accepted_at, finished_at;
    int retry_count = 0;
    std::string failure_reason;
    Seconds next_attempt_at = 0;

    std::optional<Seconds> scheduling_wait() const {
        if (!submitted_at || !accepted_at) return std::nullopt;
        return *accepted_at - *submitted_at;
    }
    std::optional<Seconds> run_time() const {
        if (!accepted_at || !finished_at || state != RunState::finished) return std::nullopt;
        return *finished_at - *accepted_at;
    }
};

struct SchedulerConfig {
    int max_concurrent_workflows = 10000;
    double memory_headroom_fraction = 0.9;
    Seconds retry_interval_seconds = 30;
    Seconds max_queue_seconds = 7200;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

enum class DeferReason { count_limit, memory, orchestrator_memory };

std::string_view to_string(DeferReason r);

/// Accept when `defer` is empty.
struct AdmissionDecision {
    std::optional<DeferReason> defer;

    bool accepted() const { return !defer.has_value(); }
};

/// What an admission check sees: node-level free memory of each pool and the
/// number of RUNNING workflows, already reduced by earlier acceptances of the
/// current tick.
struct AdmissionView {
    std::int64_t free_jobs_mib = 0;
    std::int64_t free_orchestration_mib = 0;
    int live_count = 0;
};

AdmissionDecision admission_check(const WorkflowRun& run, const AdmissionView& view, const SchedulerConfig& config);

/// The persisted record of every run that reached a terminal state.
class RunStore {
public:
    void persist(const WorkflowRun& run) { records_[run.run_id] = run; }
    const WorkflowRun* find(std::string_view run_id) const;
    std::size_t size() const noexcept { return records_.size(); }
    const std::map<std::string, WorkflowRun, std::less<>>& records() const noexcept { return records_; }

private:
    std::map<std::string, WorkflowRun, std::less<>> records_;
};

/// Submission queue plus admission control. Owns every WorkflowRun.
///
/// Runs are examined only at or after their own next-attempt time, so each
/// deferral costs exactly one retry interval. Schedule ticks are coalesced per
/// instant.
class Scheduler {
public:
    explicit Scheduler(SchedulerConfig config, RunStore& store);

    const SchedulerConfig& config() const noexcept { return config_; }
    const std::vector<WorkflowRun>& runs() const noexcept { return runs_; }
    const WorkflowRun& run(RunIndex i) const { return runs_.at(i); }
    const std::deque<RunIndex>& queue() const noexcept { return queue_; }
    int live_count() const noexcept { return live_count_; }

    /// QUEUED run appended to the FIFO; a ScheduleTick fires immediately.
    RunIndex submit_workflow(Clock& clock, std::shared_ptr<const WorkflowSpec> spec, int batch_index = 0);

    /// One admission pass over the FIFO. Accepted runs become RUNNING and are
    /// returned in acceptance order for the executor to start. Deferred runs
    /// retry after retry_interval_seconds, or fail with "scheduling-timeout"
    /// once older than max_queue_seconds.
    std::vector<RunIndex> schedule_tick(Clock& clock, const ClusterState& cluster);

    /// RUNNING -> FINISHED.
    void finish_run(RunIndex run, Seconds now);

    /// RUNNING -> FAILED (unschedulable pod).
    void fail_running_run(RunIndex run, Seconds now, std::string reason);

private:
    void request_tick(Clock& clock, Seconds delay);

    SchedulerConfig config_;
    RunStore& store_;
    std::vector<WorkflowRun> runs_;
    std::deque<RunIndex> queue_;
    std::set<Seconds> scheduled_ticks_;
    int live_count_ = 0;
};

}  // namespace wfsim
