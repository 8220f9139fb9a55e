#include "wfsim/executor.hpp"

#include "wfsim/errors.hpp"

namespace wfsim {

std::uint64_t StatusQueue::publish(StatusMessage message) {
    message.id = next_id_++;
    pending_.emplace(message.id, message);
    return message.id;
}

StatusMessage StatusQueue::consume(std::uint64_t id) {
    auto it = pending_.find(id);
    if (it == pending_.end()) throw InconsistentState("status message " + std::to_string(id) + " not in flight");
    StatusMessage m = std::move(it->second);
    pending_.erase(it);
    ++consumed_;
    return m;
}

Executor::Executor(ExecutorConfig config, ClusterState& cluster, Scheduler& scheduler)
    : config_(config), cluster_(cluster), scheduler_(scheduler) {
    if (!(config_.termination_latency_seconds >= 0))
        throw ValidationError("executor.termination_latency_seconds", "must be >= 0");
}

const RunExecutionState* Executor::execution(RunIndex run) const {
    auto it = executions_.find(run);
    return it == executions_.end() ? nullptr : &it->second;
}

void Executor::start_workflow(Clock& clock, RunIndex run_index) {
    const WorkflowRun& run = scheduler_.run(run_index);
    if (run.state != RunState::running)
        throw InconsistentState("run " + run.run_id + " started while " + std::string(to_string(run.state)));
    RunExecutionState& exec = executions_[run_index];
    exec.run = run_index;
    try {
        exec.orchestrator_pod = cluster_.create_pod(clock, run.run_id, PodKind::orchestrator, "", run.spec->orchestrator);
    } catch (const RequestExceedsLargestNode&) {
        exec.terminated = true;
        scheduler_.fail_running_run(run_index, clock.now(), "unschedulable-pod");
        return;
    }
    pod_owner_[exec.orchestrator_pod] = run_index;
}

void Executor::on_pod_started(Clock& clock, RandomStream& rng, PodIndex pod_index) {
    RunExecutionState& exec = executions_.at(pod_owner_.at(pod_index));
    if (exec.terminated) return;
    cluster_.start_pod(clock, pod_index);
    const Pod& pod = cluster_.pod(pod_index);
    if (pod.kind == PodKind::orchestrator) {
        dispatch_ready(clock, exec);
        return;
    }
    const StepSpec* step = scheduler_.run(exec.run).spec->find(pod.step_id);
    clock.schedule(step->duration.sample(rng), event::JobCompleted{pod_index});
}

std::vector<std::string> Executor::on_job_completed(Clock& clock, PodIndex pod_index) {
    const Pod& pod = cluster_.pod(pod_index);
    return on_job_completed(clock, pod_owner_.at(pod_index), pod.step_id);
}

std::vector<std::string> Executor::on_job_completed(Clock& clock, RunIndex run_index, const std::string& step_id) {
    RunExecutionState& exec = executions_.at(run_index);
    const WorkflowRun& run = scheduler_.run(run_index);
    if (!exec.dispatched.contains(step_id))
        throw UnknownStep("run " + run.run_id + " has no dispatched step '" + step_id + "'");
    if (exec.completed.contains(step_id))
        throw DuplicateCompletion("step '" + step_id + "' of " + run.run_id + " already completed");

    cluster_.complete_pod(clock, exec.job_pods.at(step_id));
    exec.completed.insert(step_id);
    clock.schedule(0, event::StatusMessage{queue_.publish(
                          {0, run_index, StatusMessage::Kind::job_succeeded, step_id, clock.now()})});

    auto dispatched = dispatch_ready(clock, exec);
    if (exec.completed.size() == run.spec->steps.size()) {
        clock.schedule(0, event::StatusMessage{queue_.publish(
                              {0, run_index, StatusMessage::Kind::workflow_finished, "", clock.now()})});
    }
    return dispatched;
}

void Executor::consume_status(Clock& clock, std::uint64_t id) {
    StatusMessage m = queue_.consume(id);
    if (m.kind == StatusMessage::Kind::workflow_finished)
        clock.schedule(config_.termination_latency_seconds, event::TerminationProcessed{m.run});
}

void Executor::process_termination(Clock& clock, RunIndex run_index) {
    const WorkflowRun& run = scheduler_.run(run_index);
    auto it = executions_.find(run_index);
    if (run.state != RunState::running || it == executions_.end() || it->second.terminated)
        throw InconsistentState("termination for " + run.run_id + " in state " + std::string(to_string(run.state)));
    RunExecutionState& exec = it->second;
    release_all(clock, exec);
    exec.terminated = true;
    scheduler_.finish_run(run_index, clock.now());
}

std::vector<std::string> Executor::dispatch_ready(Clock& clock, RunExecutionState& exec) {
    const WorkflowRun& run = scheduler_.run(exec.run);
    std::vector<std::string> dispatched;
    for (const auto& step_id : ready_steps(*run.spec, exec.completed, exec.dispatched)) {
        const StepSpec* step = run.spec->find(step_id);
        PodIndex pod;
        try {
            pod = cluster_.create_pod(clock, run.run_id, PodKind::job, step_id, step->request);
        } catch (const RequestExceedsLargestNode&) {
            fail_run(clock, exec, "unschedulable-pod");
            return dispatched;
        }
        pod_owner_[pod] = exec.run;
        exec.dispatched.insert(step_id);
        exec.job_pods[step_id] = pod;
        dispatched.push_back(step_id);
    }
    return dispatched;
}

void Executor::fail_run(Clock& clock, RunExecutionState& exec, const std::string& reason) {
    release_all(clock, exec);
    exec.terminated = true;
    scheduler_.fail_running_run(exec.run, clock.now(), reason);
}

void Executor::release_all(Clock& clock, RunExecutionState& exec) {
    for (const auto& [step, pod] : exec.job_pods)
        if (cluster_.pod(pod).state != PodState::deleted) cluster_.release_pod(clock, pod);
    if (cluster_.pod(exec.orchestrator_pod).state != PodState::deleted)
        cluster_.release_pod(clock, exec.orchestrator_pod);
}

}  // namespace wfsim
