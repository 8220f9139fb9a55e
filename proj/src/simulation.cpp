#include "wfsim/simulation.hpp"

#include <type_traits>

#include "wfsim/errors.hpp"

namespace wfsim {

Simulation::Simulation(ScenarioConfig config, SimulationOptions options)
    : config_((config.validate(), std::move(config))),
      options_(options),
      rng_(config_.seed),
      cluster_(config_.pools, config_.bind_delay_seconds),
      scheduler_(config_.scheduler, store_),
      executor_(config_.executor, cluster_, scheduler_) {}

std::size_t Simulation::generate_load() {
    if (load_generated_) return 0;
    load_generated_ = true;
    const auto& load = config_.load;
    for (int b = 0; b < load.batch_count; ++b) {
        const Seconds at = b * load.interval_seconds;
        clock_.schedule(at - clock_.now(), event::LoadBatch{b + 1});
        for (int i = 0; i < load.batch_size; ++i) clock_.schedule(at - clock_.now(), event::WorkflowSubmitted{b + 1});
    }
    return static_cast<std::size_t>(load.batch_count);
}

std::size_t Simulation::run() {
    generate_load();
    clock_.schedule(0, event::MetricsSample{});
    const std::size_t n = clock_.run_until(config_.horizon_seconds, [this](const Event& ev) { dispatch(ev); });
    events_processed_ += n;
    return n;
}

void Simulation::dispatch(const Event& ev) {
    std::string subject = handle(ev);
    if (options_.record_trace) trace_.push_back({ev.seq, ev.fire_at, payload_name(ev.payload), std::move(subject)});
    if (options_.check_invariants) check_invariants(ev);
}

std::string Simulation::handle(const Event& ev) {
    return std::visit(
        [&](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, event::LoadBatch>) {
                return "batch=" + std::to_string(p.batch_index);
            } else if constexpr (std::is_same_v<T, event::WorkflowSubmitted>) {
                RunIndex r = scheduler_.submit_workflow(clock_, config_.load.workflow, p.batch_index);
                return scheduler_.run(r).run_id;
            } else if constexpr (std::is_same_v<T, event::ScheduleTick>) {
                const auto accepted = scheduler_.schedule_tick(clock_, cluster_);
                for (RunIndex r : accepted) executor_.start_workflow(clock_, r);
                return "accepted=" + std::to_string(accepted.size()) +
                       " queued=" + std::to_string(scheduler_.queue().size());
            } else if constexpr (std::is_same_v<T, event::PodBindAttempt>) {
                const auto bound = cluster_.bind_pending(clock_, p.pool);
                for (PodIndex pod : bound) clock_.schedule(0, event::PodStarted{pod});
                return std::string(to_string(p.pool)) + " bound=" + std::to_string(bound.size()) +
                       " pending=" + std::to_string(cluster_.pending(p.pool).size());
            } else if constexpr (std::is_same_v<T, event::PodStarted>) {
                executor_.on_pod_started(clock_, rng_, p.pod);
                return cluster_.pod(p.pod).id;
            } else if constexpr (std::is_same_v<T, event::JobCompleted>) {
                executor_.on_job_completed(clock_, p.pod);
                return cluster_.pod(p.pod).id;
            } else if constexpr (std::is_same_v<T, event::StatusMessage>) {
                executor_.consume_status(clock_, p.message);
                return "message=" + std::to_string(p.message);
            } else if constexpr (std::is_same_v<T, event::TerminationProcessed>) {
                executor_.process_termination(clock_, p.run);
                return scheduler_.run(p.run).run_id;
            } else {
                static_assert(std::is_same_v<T, event::MetricsSample>);
                samples_.push_back(cluster_.utilization_sample(Pool::orchestration, clock_.now()));
                samples_.push_back(cluster_.utilization_sample(Pool::jobs, clock_.now()));
                const Seconds step = config_.analysis.sample_interval_seconds;
                if (clock_.now() + step <= config_.horizon_seconds) clock_.schedule(step, event::MetricsSample{});
                return "samples=" + std::to_string(samples_.size());
            }
        },
        ev.payload);
}

void Simulation::check_invariants(const Event& ev) {
    for (auto& v : cluster_.check_conservation())
        violations_.push_back("event #" + std::to_string(ev.seq) + ": " + std::move(v));
    if (scheduler_.live_count() > config_.scheduler.max_concurrent_workflows)
        violations_.push_back("event #" + std::to_string(ev.seq) + ": RUNNING count exceeds the limit");
}

}  // namespace wfsim
