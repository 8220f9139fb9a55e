#include "wfsim/scheduler.hpp"

#include <cstdio>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view to_string(RunState s) {
    switch (s) {
        case RunState::queued: return "QUEUED";
        case RunState::running: return "RUNNING";
        case RunState::finished: return "FINISHED";
        case RunState::failed: return "FAILED";
    }
    return "?";
}

std::string_view to_string(DeferReason r) {
    switch (r) {
        case DeferReason::count_limit: return "count-limit";
        case DeferReason::memory: return "memory";
        case DeferReason::orchestrator_memory: return "orchestrator-memory";
    }
    return "?";
}

void SchedulerConfig::validate() const {
    if (max_concurrent_workflows <= 0) throw ValidationError("scheduler.max_concurrent_workflows", "must be > 0");
    if (!(memory_headroom_fraction > 0 && memory_headroom_fraction <= 1))
        throw ValidationError("scheduler.memory_headroom_fraction", "must lie in (0, 1]");
    if (!(retry_interval_seconds > 0)) throw ValidationError("scheduler.retry_interval_seconds", "must be > 0");
    if (!(max_queue_seconds > 0)) throw ValidationError("scheduler.max_queue_seconds", "must be > 0");
}

AdmissionDecision admission_check(const WorkflowRun& run, const AdmissionView& view, const SchedulerConfig& config) {
    if (view.live_count >= config.max_concurrent_workflows) return {DeferReason::count_limit};
    const double budget = config.memory_headroom_fraction * static_cast<double>(view.free_jobs_mib);
    if (static_cast<double>(run.peak_demand.memory_mib) > budget) return {DeferReason::memory};
    if (run.spec->orchestrator.memory_mib > view.free_orchestration_mib) return {DeferReason::orchestrator_memory};
    return {};
}

const WorkflowRun* RunStore::find(std::string_view run_id) const {
    auto it = records_.find(run_id);
    return it == records_.end() ? nullptr : &it->second;
}

Scheduler::Scheduler(SchedulerConfig config, RunStore& store) : config_(config), store_(store) {
    config_.validate();
}

RunIndex Scheduler::submit_workflow(Clock& clock, std::shared_ptr<const WorkflowSpec> spec, int batch_index) {
    char id[32];
    std::snprintf(id, sizeof id, "run-%06zu", runs_.size() + 1);

    WorkflowRun run;
    run.run_id = id;
    run.peak_demand = peak_parallel_demand(*spec);
    run.spec = std::move(spec);
    run.batch_index = batch_index;
    run.submitted_at = clock.now();
    run.next_attempt_at = clock.now();

    const RunIndex index = runs_.size();
    runs_.push_back(std::move(run));
    queue_.push_back(index);
    request_tick(clock, 0);
    return index;
}

std::vector<RunIndex> Scheduler::schedule_tick(Clock& clock, const ClusterState& cluster) {
    const Seconds now = clock.now();
    scheduled_ticks_.erase(now);

    AdmissionView view{cluster.free_resources(Pool::jobs).memory_mib,
                       cluster.free_resources(Pool::orchestration).memory_mib, live_count_};
    std::vector<RunIndex> accepted;
    std::deque<RunIndex> still_queued;
    bool retry_needed = false;

    for (RunIndex index : queue_) {
        WorkflowRun& run = runs_[index];
        if (run.next_attempt_at > now) {
            still_queued.push_back(index);
            continue;
        }
        if (admission_check(run, view, config_).accepted()) {
            run.state = RunState::running;
            run.accepted_at = now;
            view.free_jobs_mib -= run.peak_demand.memory_mib;
            view.free_orchestration_mib -= run.spec->orchestrator.memory_mib;
            ++view.live_count;
            ++live_count_;
            accepted.push_back(index);
            continue;
        }
        if (now - *run.submitted_at > config_.max_queue_seconds) {
            run.state = RunState::failed;
            run.finished_at = now;
            run.failure_reason = "scheduling-timeout";
            store_.persist(run);
            continue;
        }
        ++run.retry_count;
        run.next_attempt_at = now + config_.retry_interval_seconds;
        retry_needed = true;
        still_queued.push_back(index);
    }
    queue_ = std::move(still_queued);
    if (retry_needed) request_tick(clock, config_.retry_interval_seconds);
    return accepted;
}

void Scheduler::finish_run(RunIndex index, Seconds now) {
    WorkflowRun& run = runs_.at(index);
    if (run.state != RunState::running)
        throw InconsistentState("run " + run.run_id + " finished while " + std::string(to_string(run.state)));
    run.state = RunState::finished;
    run.finished_at = now;
    --live_count_;
    store_.persist(run);
}

void Scheduler::fail_running_run(RunIndex index, Seconds now, std::string reason) {
    WorkflowRun& run = runs_.at(index);
    if (run.state != RunState::running)
        throw InconsistentState("run " + run.run_id + " failed while " + std::string(to_string(run.state)));
    run.state = RunState::failed;
    run.finished_at = now;
    run.failure_reason = std::move(reason);
    --live_count_;
    store_.persist(run);
}

void Scheduler::request_tick(Clock& clock, Seconds delay) {
    if (scheduled_ticks_.insert(clock.now() + delay).second) clock.schedule(delay, event::ScheduleTick{});
}

}  // namespace wfsim
