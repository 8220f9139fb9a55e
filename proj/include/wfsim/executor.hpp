#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/random.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/sim_clock.hpp"

namespace wfsim {

struct ExecutorConfig {
    Seconds termination_latency_seconds = 5;
};

struct RunExecutionState {
    RunIndex run = 0;
    PodIndex orchestrator_pod = 0;
    StepSet dispatched;
    StepSet completed;
    std::map<std::string, PodIndex, std::less<>> job_pods;
    bool terminated = false;
};

struct StatusMessage {
    enum class Kind { job_succeeded, workflow_finished };

    std::uint64_t id = 0;
    RunIndex run = 0;
    Kind kind = Kind::job_succeeded;
    std::string step_id;
    Seconds emitted_at = 0;
};

/// In-process stand-in for the status message queue. Every published message
/// is consumed exactly once.
class StatusQueue {
public:
    std::uint64_t publish(StatusMessage message);
    /// Throws InconsistentState for an unknown or already-consumed id.
    StatusMessage consume(std::uint64_t id);

    std::uint64_t published() const noexcept { return next_id_; }
    std::uint64_t consumed() const noexcept { return consumed_; }
    std::size_t in_flight() const noexcept { return pending_.size(); }

private:
    std::uint64_t next_id_ = 0;
    std::uint64_t consumed_ = 0;
    std::map<std::uint64_t, StatusMessage> pending_;
};

/// Drives accepted runs: an orchestrator pod per run, a job pod per step as
/// it becomes ready, and asynchronous termination. Completion is
/// event-driven rather than polled.
class Executor {
public:
    Executor(ExecutorConfig config, ClusterState& cluster, Scheduler& scheduler);

    const ExecutorConfig& config() const noexcept { return config_; }
    const StatusQueue& status_queue() const noexcept { return queue_; }
    const RunExecutionState* execution(RunIndex run) const;

    /// Creates the run's orchestrator pod. An impossible request fails the
    /// run with "unschedulable-pod".
    void start_workflow(Clock& clock, RunIndex run);

    /// PodStarted handler. Orchestrators dispatch the source steps; job pods
    /// draw a duration and schedule their JobCompleted.
    void on_pod_started(Clock& clock, RandomStream& rng, PodIndex pod);

    /// JobCompleted handler: marks the step done, publishes job-succeeded,
    /// dispatches newly ready steps (lexicographic order) and publishes
    /// workflow-finished after the last step. Returns the new dispatches.
    std::vector<std::string> on_job_completed(Clock& clock, PodIndex pod);

    /// Same as above addressed by step. Throws UnknownStep or
    /// DuplicateCompletion.
    std::vector<std::string> on_job_completed(Clock& clock, RunIndex run, const std::string& step_id);

    /// StatusMessage handler. A workflow-finished message schedules the
    /// run's termination after termination_latency_seconds.
    void consume_status(Clock& clock, std::uint64_t message);

    /// Releases the run's pods, marks it FINISHED and persists it to the
    /// scheduler's run store. Throws
    /// InconsistentState if the run is not RUNNING.
    void process_termination(Clock& clock, RunIndex run);

private:
    std::vector<std::string> dispatch_ready(Clock& clock, RunExecutionState& exec);
    void fail_run(Clock& clock, RunExecutionState& exec, const std::string& reason);
    void release_all(Clock& clock, RunExecutionState& exec);

    ExecutorConfig config_;
    ClusterState& cluster_;
    Scheduler& scheduler_;
    StatusQueue queue_;
    std::map<RunIndex, RunExecutionState> executions_;
    std::map<PodIndex, RunIndex> pod_owner_;
};

}  // namespace wfsim
