#include "wfsim/workflow_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "wfsim/errors.hpp"

namespace wfsim {

using nlohmann::json;

const StepSpec* WorkflowSpec::find(std::string_view id) const {
    auto it = std::find_if(steps.begin(), steps.end(), [&](const StepSpec& s) { return s.id == id; });
    return it == steps.end() ? nullptr : &*it;
}

namespace {

// Returns the ids along one dependency cycle, or empty if the graph is acyclic.
std::vector<std::string> find_cycle(const WorkflowSpec& spec) {
    enum class Mark { none, active, done };
    std::map<std::string, Mark, std::less<>> mark;
    std::vector<std::string> stack;
    std::vector<std::string> cycle;

    std::function<bool(const StepSpec&)> visit = [&](const StepSpec& step) {
        mark[step.id] = Mark::active;
        stack.push_back(step.id);
        for (const auto& dep : step.depends_on) {
            const StepSpec* next = spec.find(dep);
            if (next == nullptr) continue;
            Mark m = mark[dep];
            if (m == Mark::active) {
                auto from = std::find(stack.begin(), stack.end(), dep);
                cycle.assign(from, stack.end());
                cycle.push_back(dep);
                return true;
            }
            if (m == Mark::none && visit(*next)) return true;
        }
        stack.pop_back();
        mark[step.id] = Mark::done;
        return false;
    };

    for (const auto& step : spec.steps) {
        if (mark[step.id] == Mark::none && visit(step)) return cycle;
    }
    return {};
}

std::string join(const std::vector<std::string>& ids, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += ids[i];
    }
    return out;
}

void validate_duration(const StepSpec& step) {
    const auto& d = step.duration;
    if (!std::isfinite(d.min_seconds) || !std::isfinite(d.max_seconds))
        throw ValidationError(step.id, "duration must be finite");
    if (d.kind == DurationModel::Kind::fixed) {
        if (d.min_seconds <= 0) throw ValidationError(step.id, "fixed duration must be > 0 seconds");
    } else {
        if (d.min_seconds <= 0) throw ValidationError(step.id, "uniform min_seconds must be > 0");
        if (d.min_seconds > d.max_seconds)
            throw ValidationError(step.id, "uniform min_seconds exceeds max_seconds");
    }
}

}  // namespace

void validate(const WorkflowSpec& spec) {
    if (spec.steps.empty()) throw ValidationError(spec.name, "workflow has no steps");
    if (spec.orchestrator.millicores < 0 || spec.orchestrator.memory_mib < 0)
        throw ValidationError("orchestrator", "negative resource request");

    StepSet seen;
    for (const auto& step : spec.steps) {
        if (step.id.empty()) throw ValidationError("", "step with empty id");
        if (!seen.insert(step.id).second) throw ValidationError(step.id, "duplicate step id");
    }
    for (const auto& step : spec.steps) {
        if (step.request.millicores < 1) throw ValidationError(step.id, "cores_millicores must be >= 1");
        if (step.request.memory_mib < 1) throw ValidationError(step.id, "memory_mib must be >= 1");
        validate_duration(step);
        StepSet deps;
        for (const auto& dep : step.depends_on) {
            if (dep == step.id) throw ValidationError(step.id, "step depends on itself");
            if (!seen.contains(dep)) throw ValidationError(step.id, "depends on unknown step '" + dep + "'");
            if (!deps.insert(dep).second) throw ValidationError(step.id, "duplicate dependency '" + dep + "'");
        }
    }
    if (auto cycle = find_cycle(spec); !cycle.empty())
        throw ValidationError(cycle.front(), "dependency cycle " + join(cycle, " -> "));
}

namespace {

std::string field(const std::string& path, std::string_view name) {
    return path.empty() ? std::string(name) : path + "." + std::string(name);
}

const json& require(const json& obj, const std::string& path, std::string_view name) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ValidationError(field(path, name), "missing field");
    return *it;
}

std::int64_t require_int(const json& obj, const std::string& path, std::string_view name) {
    const json& v = require(obj, path, name);
    if (!v.is_number_integer()) throw ValidationError(field(path, name), "expected an integer");
    return v.get<std::int64_t>();
}

double require_number(const json& obj, const std::string& path, std::string_view name) {
    const json& v = require(obj, path, name);
    if (!v.is_number()) throw ValidationError(field(path, name), "expected a number");
    return v.get<double>();
}

DurationModel duration_from_json(const json& d, const std::string& path) {
    if (!d.is_object()) throw ValidationError(path, "expected an object");
    const json& kind = require(d, path, "kind");
    if (kind == "fixed") return DurationModel::fixed(require_number(d, path, "seconds"));
    if (kind == "uniform")
        return DurationModel::uniform(require_number(d, path, "min_seconds"),
                                      require_number(d, path, "max_seconds"));
    throw ValidationError(field(path, "kind"), "expected \"fixed\" or \"uniform\"");
}

}  // namespace

WorkflowSpec workflow_from_json(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ValidationError(path, "workflow document must be an object");
    WorkflowSpec spec;
    const json& name = require(doc, path, "name");
    if (!name.is_string()) throw ValidationError(field(path, "name"), "expected a string");
    spec.name = name.get<std::string>();

    if (auto it = doc.find("orchestrator"); it != doc.end()) {
        const std::string opath = field(path, "orchestrator");
        if (!it->is_object()) throw ValidationError(opath, "expected an object");
        if (it->contains("cores_millicores"))
            spec.orchestrator.millicores = require_int(*it, opath, "cores_millicores");
        if (it->contains("memory_mib")) spec.orchestrator.memory_mib = require_int(*it, opath, "memory_mib");
    }

    const json& steps = require(doc, path, "steps");
    if (!steps.is_array()) throw ValidationError(field(path, "steps"), "expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string spath = field(path, "steps") + "[" + std::to_string(i) + "]";
        const json& s = steps[i];
        if (!s.is_object()) throw ValidationError(spath, "expected an object");
        StepSpec step;
        const json& id = require(s, spath, "id");
        if (!id.is_string()) throw ValidationError(field(spath, "id"), "expected a string");
        step.id = id.get<std::string>();
        if (auto deps = s.find("depends_on"); deps != s.end()) {
            if (!deps->is_array()) throw ValidationError(step.id, "depends_on must be an array");
            for (const auto& d : *deps) {
                if (!d.is_string()) throw ValidationError(step.id, "depends_on entries must be strings");
                step.depends_on.push_back(d.get<std::string>());
            }
        }
        step.request.millicores = require_int(s, spath, "cores_millicores");
        step.request.memory_mib = require_int(s, spath, "memory_mib");
        step.duration = duration_from_json(require(s, spath, "duration"), field(spath, "duration"));
        spec.steps.push_back(std::move(step));
    }
    validate(spec);
    return spec;
}

WorkflowSpec parse_workflow_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed workflow document: ") + e.what());
    }
    return workflow_from_json(doc);
}

json workflow_to_json(const WorkflowSpec& spec) {
    json steps = json::array();
    for (const auto& s : spec.steps) {
        json d;
        if (s.duration.kind == DurationModel::Kind::fixed) {
            d = {{"kind", "fixed"}, {"seconds", s.duration.min_seconds}};
        } else {
            d = {{"kind", "uniform"},
                 {"min_seconds", s.duration.min_seconds},
                 {"max_seconds", s.duration.max_seconds}};
        }
        steps.push_back({{"id", s.id},
                         {"depends_on", s.depends_on},
                         {"cores_millicores", s.request.millicores},
                         {"memory_mib", s.request.memory_mib},
                         {"duration", d}});
    }
    return {{"name", spec.name},
            {"orchestrator",
             {{"cores_millicores", spec.orchestrator.millicores}, {"memory_mib", spec.orchestrator.memory_mib}}},
            {"steps", steps}};
}

std::vector<std::string> topological_order(const WorkflowSpec& spec) {
    std::map<std::string, int, std::less<>> indegree;
    std::map<std::string, std::vector<std::string>, std::less<>> dependents;
    for (const auto& s : spec.steps) {
        indegree[s.id] += 0;
        for (const auto& d : s.depends_on) {
            ++indegree[s.id];
            dependents[d].push_back(s.id);
        }
    }
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, n] : indegree)
        if (n == 0) ready.push(id);

    std::vector<std::string> order;
    order.reserve(spec.steps.size());
    while (!ready.empty()) {
        std::string id = ready.top();
        ready.pop();
        for (const auto& next : dependents[id])
            if (--indegree[next] == 0) ready.push(next);
        order.push_back(std::move(id));
    }
    return order;
}

StepSet ready_steps(const WorkflowSpec& spec, const StepSet& completed, const StepSet& dispatched) {
    StepSet ready;
    for (const auto& s : spec.steps) {
        if (dispatched.contains(s.id)) continue;
        bool ok = std::all_of(s.depends_on.begin(), s.depends_on.end(),
                              [&](const std::string& d) { return completed.contains(d); });
        if (ok) ready.insert(s.id);
    }
    return ready;
}

std::map<std::string, int, std::less<>> step_levels(const WorkflowSpec& spec) {
    std::map<std::string, int, std::less<>> level;
    for (const auto& id : topological_order(spec)) {
        int l = 0;
        for (const auto& d : spec.find(id)->depends_on) l = std::max(l, level.at(d) + 1);
        level[id] = l;
    }
    return level;
}

int level_count(const WorkflowSpec& spec) {
    int n = 0;
    for (const auto& [id, l] : step_levels(spec)) n = std::max(n, l + 1);
    return n;
}

Resources peak_parallel_demand(const WorkflowSpec& spec) {
    std::map<int, Resources> per_level;
    for (const auto& [id, l] : step_levels(spec)) per_level[l] += spec.find(id)->request;

    Resources peak;
    for (const auto& [l, r] : per_level) {
        peak.millicores = std::max(peak.millicores, r.millicores);
        peak.memory_mib = std::max(peak.memory_mib, r.memory_mib);
    }
    return peak + spec.orchestrator;
}

Seconds critical_path_seconds(const WorkflowSpec& spec) {
    std::map<std::string, Seconds, std::less<>> finish;
    Seconds longest = 0;
    for (const auto& id : topological_order(spec)) {
        const StepSpec& s = *spec.find(id);
        Seconds start = 0;
        for (const auto& d : s.depends_on) start = std::max(start, finish.at(d));
        finish[id] = start + s.duration.mean();
        longest = std::max(longest, finish[id]);
    }
    return longest;
}

}  // namespace wfsim
