#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wfsim/random.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

/// Step runtime model: a fixed value or a uniform draw from [min, max].
struct DurationModel {
    enum class Kind { fixed, uniform };

    Kind kind = Kind::fixed;
    Seconds min_seconds = 0;
    Seconds max_seconds = 0;

    static DurationModel fixed(Seconds s) { return {Kind::fixed, s, s}; }
    static DurationModel uniform(Seconds lo, Seconds hi) { return {Kind::uniform, lo, hi}; }

    Seconds mean() const { return kind == Kind::fixed ? min_seconds : 0.5 * (min_seconds + max_seconds); }

    /// Fixed models never touch the stream.
    Seconds sample(RandomStream& rng) const {
        return kind == Kind::fixed ? min_seconds : rng.uniform(min_seconds, max_seconds);
    }
};

struct StepSpec {
    std::string id;
    std::vector<std::string> depends_on;
    Resources request;
    DurationModel duration;
};

inline constexpr Resources kDefaultOrchestratorRequest{100, 256};

struct WorkflowSpec {
    std::string name;
    std::vector<StepSpec> steps;
    Resources orchestrator = kDefaultOrchestratorRequest;

    /// nullptr when absent.
    const StepSpec* find(std::string_view id) const;
};

using StepSet = std::set<std::string, std::less<>>;

/// Throws ValidationError naming the offending step on: duplicate or empty id,
/// dangling or self dependency, nonpositive request, bad duration, cycle,
/// empty workflow, negative orchestrator request.
void validate(const WorkflowSpec& spec);

/// Parses and validates a JSON workflow document.
/// SyntaxError on malformed JSON, ValidationError otherwise.
WorkflowSpec parse_workflow_spec(std::string_view text);

/// Same as parse_workflow_spec on an already-parsed document; `path` prefixes
/// field names in error messages.
WorkflowSpec workflow_from_json(const nlohmann::json& doc, const std::string& path = "");

nlohmann::json workflow_to_json(const WorkflowSpec& spec);

/// Kahn's algorithm with a min-heap on step id: the lexicographically smallest
/// valid order.
std::vector<std::string> topological_order(const WorkflowSpec& spec);

/// Steps not yet dispatched whose dependencies have all completed.
StepSet ready_steps(const WorkflowSpec& spec, const StepSet& completed, const StepSet& dispatched);

/// Longest-path depth of every step from the sources (sources are level 0).
std::map<std::string, int, std::less<>> step_levels(const WorkflowSpec& spec);

/// Number of distinct levels, i.e. steps on the longest dependency chain.
int level_count(const WorkflowSpec& spec);

/// Per-level maxima of summed cores and (independently) summed memory, each
/// plus the orchestrator request.
Resources peak_parallel_demand(const WorkflowSpec& spec);

/// Longest dependency chain measured in mean step durations.
Seconds critical_path_seconds(const WorkflowSpec& spec);

}  // namespace wfsim
