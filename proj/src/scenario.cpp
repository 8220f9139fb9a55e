#include "wfsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "wfsim/errors.hpp"

namespace wfsim {

using nlohmann::json;

Window ScenarioConfig::saturation_window() const {
    if (analysis.saturation_window) return *analysis.saturation_window;
    const Seconds iv = load.interval_seconds;
    return {2 * iv, std::max(2, load.batch_count - 1) * iv};
}

Window ScenarioConfig::steady_window() const {
    if (analysis.steady_window) return *analysis.steady_window;
    return {load.interval_seconds, load.batch_count * load.interval_seconds};
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ValidationError("name", "must not be empty");
    bool has_jobs = false, has_orchestration = false;
    for (std::size_t i = 0; i < pools.size(); ++i) {
        const auto& p = pools[i];
        const std::string path = "cluster.pools[" + std::to_string(i) + "]";
        if (p.node_count <= 0) throw ValidationError(path + ".node_count", "must be > 0");
        if (p.node_capacity.millicores <= 0) throw ValidationError(path + ".cores_millicores_per_node", "must be > 0");
        if (p.node_capacity.memory_mib <= 0) throw ValidationError(path + ".memory_mib_per_node", "must be > 0");
        bool& seen = p.pool == Pool::jobs ? has_jobs : has_orchestration;
        if (seen) throw ValidationError(path + ".name", "duplicate pool");
        seen = true;
    }
    if (!has_jobs) throw ValidationError("cluster.pools", "missing the \"jobs\" pool");
    if (!has_orchestration) throw ValidationError("cluster.pools", "missing the \"orchestration\" pool");
    if (!(bind_delay_seconds >= 0)) throw ValidationError("cluster.bind_delay_seconds", "must be >= 0");
    scheduler.validate();
    if (!(executor.termination_latency_seconds >= 0))
        throw ValidationError("executor.termination_latency_seconds", "must be >= 0");
    if (!load.workflow) throw ValidationError("load.workflow_spec", "missing");
    if (load.batch_size <= 0) throw ValidationError("load.batch_size", "must be > 0");
    if (load.batch_count <= 0) throw ValidationError("load.batch_count", "must be > 0");
    if (!(load.interval_seconds > 0)) throw ValidationError("load.interval_seconds", "must be > 0");
    if (!(horizon_seconds >= load.interval_seconds * load.batch_count))
        throw ValidationError("horizon_seconds", "shorter than the load schedule (interval_seconds * batch_count)");
    if (!(analysis.sample_interval_seconds > 0))
        throw ValidationError("analysis.sample_interval_seconds", "must be > 0");
    for (const auto& [label, w] : {std::pair{"analysis.saturation_window_seconds", analysis.saturation_window},
                                   std::pair{"analysis.steady_window_seconds", analysis.steady_window}}) {
        if (w && !(w->second > w->first && w->first >= 0)) throw ValidationError(label, "needs 0 <= start < end");
    }
}

namespace {

std::string join_path(const std::string& path, std::string_view name) {
    return path.empty() ? std::string(name) : path + "." + std::string(name);
}

const json& member(const json& obj, const std::string& path, std::string_view name) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) throw ValidationError(join_path(path, name), "missing field");
    return *it;
}

template <typename T>
T number(const json& obj, const std::string& path, std::string_view name) {
    const json& v = member(obj, path, name);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(join_path(path, name), "expected an integer");
    } else {
        if (!v.is_number()) throw ValidationError(join_path(path, name), "expected a number");
    }
    return v.get<T>();
}

template <typename T>
T number_or(const json& obj, const std::string& path, std::string_view name, T fallback) {
    return obj.is_object() && obj.contains(name) ? number<T>(obj, path, name) : fallback;
}

std::optional<Window> window_or_none(const json& obj, const std::string& path, std::string_view name) {
    if (!obj.is_object() || !obj.contains(name)) return std::nullopt;
    const json& w = obj.at(name);
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
        throw ValidationError(join_path(path, name), "expected [start, end]");
    return Window{w[0].get<double>(), w[1].get<double>()};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed scenario document: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("", "scenario document must be an object");

    ScenarioConfig cfg;
    const json& name = member(doc, "", "name");
    if (!name.is_string()) throw ValidationError("name", "expected a string");
    cfg.name = name.get<std::string>();
    cfg.seed = number_or<std::uint64_t>(doc, "", "seed", cfg.seed);

    const json& cluster = member(doc, "", "cluster");
    const json& pools = member(cluster, "cluster", "pools");
    if (!pools.is_array()) throw ValidationError("cluster.pools", "expected an array");
    for (std::size_t i = 0; i < pools.size(); ++i) {
        const std::string path = "cluster.pools[" + std::to_string(i) + "]";
        const json& pname = member(pools[i], path, "name");
        PoolSpec spec;
        if (pname == "jobs") {
            spec.pool = Pool::jobs;
        } else if (pname == "orchestration") {
            spec.pool = Pool::orchestration;
        } else {
            throw ValidationError(path + ".name", "expected \"orchestration\" or \"jobs\"");
        }
        spec.node_count = number<int>(pools[i], path, "node_count");
        spec.node_capacity = {number<std::int64_t>(pools[i], path, "cores_millicores_per_node"),
                              number<std::int64_t>(pools[i], path, "memory_mib_per_node")};
        cfg.pools.push_back(spec);
    }
    cfg.bind_delay_seconds = number_or<double>(cluster, "cluster", "bind_delay_seconds", cfg.bind_delay_seconds);

    if (doc.contains("scheduler")) {
        const json& s = doc.at("scheduler");
        auto& sc = cfg.scheduler;
        sc.max_concurrent_workflows = number_or<int>(s, "scheduler", "max_concurrent_workflows", sc.max_concurrent_workflows);
        sc.memory_headroom_fraction =
            number_or<double>(s, "scheduler", "memory_headroom_fraction", sc.memory_headroom_fraction);
        sc.retry_interval_seconds = number_or<double>(s, "scheduler", "retry_interval_seconds", sc.retry_interval_seconds);
        sc.max_queue_seconds = number_or<double>(s, "scheduler", "max_queue_seconds", sc.max_queue_seconds);
    }
    if (doc.contains("executor")) {
        cfg.executor.termination_latency_seconds = number_or<double>(
            doc.at("executor"), "executor", "termination_latency_seconds", cfg.executor.termination_latency_seconds);
    }

    const json& load = member(doc, "", "load");
    const json& wf = member(load, "load", "workflow_spec");
    if (wf.is_string()) {
        std::filesystem::path p = wf.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        std::string text_of_spec;
        try {
            text_of_spec = read_file(p);
        } catch (const Error& e) {
            throw ValidationError("load.workflow_spec", e.what());
        }
        cfg.load.workflow = std::make_shared<const WorkflowSpec>(parse_workflow_spec(text_of_spec));
    } else if (wf.is_object()) {
        cfg.load.workflow = std::make_shared<const WorkflowSpec>(workflow_from_json(wf, "load.workflow_spec"));
    } else {
        throw ValidationError("load.workflow_spec", "expected a path or an inline workflow object");
    }
    cfg.load.batch_size = number<int>(load, "load", "batch_size");
    cfg.load.interval_seconds = number<double>(load, "load", "interval_seconds");
    cfg.load.batch_count = number<int>(load, "load", "batch_count");
    cfg.horizon_seconds = number<double>(doc, "", "horizon_seconds");

    if (doc.contains("analysis")) {
        const json& a = doc.at("analysis");
        auto& ac = cfg.analysis;
        ac.overflow.slope_threshold =
            number_or<double>(a, "analysis", "overflow_slope_threshold", ac.overflow.slope_threshold);
        ac.overflow.growth_factor = number_or<double>(a, "analysis", "overflow_growth_factor", ac.overflow.growth_factor);
        ac.sample_interval_seconds =
            number_or<double>(a, "analysis", "sample_interval_seconds", ac.sample_interval_seconds);
        ac.saturation_window = window_or_none(a, "analysis", "saturation_window_seconds");
        ac.steady_window = window_or_none(a, "analysis", "steady_window_seconds");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
    return parse_scenario(read_file(path), path.parent_path());
}

}  // namespace wfsim
