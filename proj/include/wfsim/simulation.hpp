#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/executor.hpp"
#include "wfsim/random.hpp"
#include "wfsim/scenario.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/sim_clock.hpp"

namespace wfsim {

struct SimulationOptions {
    /// Recompute node allocations from pod states after every event.
    bool check_invariants = true;
    bool record_trace = true;
};

struct TraceRecord {
    std::uint64_t seq = 0;
    Seconds time_s = 0;
    std::string_view event;
    std::string subject;
};

/// One scenario's world: clock, cluster, scheduler, executor and the seeded
/// random stream, wired to the event dispatcher. Single-threaded; independent
/// instances share nothing.
class Simulation {
public:
    explicit Simulation(ScenarioConfig config, SimulationOptions options = {});

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Schedules batch_count LoadBatch events at 0, interval, 2*interval, ...
    /// together with batch_size WorkflowSubmitted events per batch. Returns
    /// the number of LoadBatch events.
    std::size_t generate_load();

    /// Generates the load (if not done yet), starts utilization sampling and
    /// runs to the horizon. Returns the number of events processed.
    std::size_t run();

    const ScenarioConfig& config() const noexcept { return config_; }
    const Clock& clock() const noexcept { return clock_; }
    const ClusterState& cluster() const noexcept { return cluster_; }
    const Scheduler& scheduler() const noexcept { return scheduler_; }
    const Executor& executor() const noexcept { return executor_; }
    const RunStore& store() const noexcept { return store_; }
    const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
    const std::vector<UtilizationSample>& samples() const noexcept { return samples_; }
    const std::vector<std::string>& invariant_violations() const noexcept { return violations_; }
    std::size_t events_processed() const noexcept { return events_processed_; }

private:
    void dispatch(const Event& ev);
    std::string handle(const Event& ev);
    void check_invariants(const Event& ev);

    ScenarioConfig config_;
    SimulationOptions options_;
    Clock clock_;
    RandomStream rng_;
    RunStore store_;
    ClusterState cluster_;
    Scheduler scheduler_;
    Executor executor_;
    bool load_generated_ = false;
    std::size_t events_processed_ = 0;
    std::vector<TraceRecord> trace_;
    std::vector<UtilizationSample> samples_;
    std::vector<std::string> violations_;
};

}  // namespace wfsim
