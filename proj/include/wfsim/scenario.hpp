#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/executor.hpp"
#include "wfsim/metrics.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/workflow_model.hpp"

namespace wfsim {

struct LoadConfig {
    std::shared_ptr<const WorkflowSpec> workflow;
    int batch_size = 0;
    Seconds interval_seconds = 0;
    int batch_count = 0;
};

using Window = std::pair<Seconds, Seconds>;

struct AnalysisConfig {
    OverflowCriterion overflow;
    Seconds sample_interval_seconds = 60;
    /// Defaults: [2 * interval, (batch_count - 1) * interval].
    std::optional<Window> saturation_window;
    /// Defaults: [interval, batch_count * interval].
    std::optional<Window> steady_window;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 1;
    std::vector<PoolSpec> pools;
    Seconds bind_delay_seconds = 5;
    SchedulerConfig scheduler;
    ExecutorConfig executor;
    LoadConfig load;
    Seconds horizon_seconds = 0;
    AnalysisConfig analysis;

    Window saturation_window() const;
    Window steady_window() const;
    /// Arrival rate in workflows per second.
    double arrival_rate() const { return load.batch_size / load.interval_seconds; }

    /// Throws ValidationError with the field path.
    void validate() const;
};

/// Parses a JSON scenario document. A string `load.workflow_spec` is a path,
/// resolved against `base_dir` when relative; an object is an inline spec.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a scenario file.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

}  // namespace wfsim
