#include "wfsim/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string format_seconds(double s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

namespace {

std::string opt_seconds(const std::optional<Seconds>& s) { return s ? format_seconds(*s) : std::string(); }

std::string fraction(double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", f);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

int ScenarioReport::exit_code() const {
    if (verdict == Verdict::overloaded) return exit_overloaded;
    if (failed > 0) return exit_failed_runs;
    return exit_sustainable;
}

ScenarioReport analyze(const Simulation& sim) {
    const ScenarioConfig& cfg = sim.config();
    const auto& runs = sim.scheduler().runs();

    ScenarioReport r;
    r.scenario = cfg.name;
    r.runs = collect_run_metrics(runs, cfg.horizon_seconds);
    r.batches = batch_wait_series(r.runs);
    if (r.batches.size() >= 4) {
        std::vector<double> medians;
        for (const auto& b : r.batches) medians.push_back(b.median_wait_s);
        r.verdict = detect_overflow(medians, cfg.analysis.overflow);
    }
    r.saturation_window = cfg.saturation_window();
    r.saturation_utilization =
        mean_core_utilization(sim.cluster(), Pool::jobs, r.saturation_window.first, r.saturation_window.second);
    r.required_core_capacity_mc =
        required_core_capacity(*cfg.load.workflow, cfg.arrival_rate(), cfg.bind_delay_seconds);
    r.supplied_jobs_mc = sim.cluster().pool_capacity(Pool::jobs).millicores;
    if (r.verdict == Verdict::sustainable) {
        const Window w = cfg.steady_window();
        try {
            r.littles_law = littles_law_check(runs, w.first, w.second, *r.verdict);
        } catch (const WindowTooShort&) {
        }
    }
    r.submitted = runs.size();
    for (const auto& run : runs) {
        switch (run.state) {
            case RunState::queued: ++r.queued; break;
            case RunState::running: ++r.running; break;
            case RunState::finished: ++r.finished; break;
            case RunState::failed: ++r.failed; break;
        }
    }
    r.events = sim.events_processed();
    r.invariant_violations = sim.invariant_violations().size();
    r.status_published = sim.executor().status_queue().published();
    r.status_consumed = sim.executor().status_queue().consumed();
    return r;
}

std::string format_summary(const ScenarioReport& r) {
    std::ostringstream out;
    char line[256];
    out << "scenario: " << r.scenario << "\n";
    out << "verdict: " << (r.verdict ? std::string(to_string(*r.verdict)) : std::string("Undetermined")) << "\n";
    out << "exit_code: " << r.exit_code() << "\n";
    out << "runs: submitted=" << r.submitted << " finished=" << r.finished << " running=" << r.running
        << " queued=" << r.queued << " failed=" << r.failed << "\n";
    std::snprintf(line, sizeof line, "required_core_capacity: %.0f millicores (%.1f cores)\n",
                  r.required_core_capacity_mc, r.required_core_capacity_mc / 1000.0);
    out << line;
    std::snprintf(line, sizeof line, "supplied_jobs_capacity: %lld millicores (%.1f cores)\n",
                  static_cast<long long>(r.supplied_jobs_mc), r.supplied_jobs_mc / 1000.0);
    out << line;
    out << "saturation_window_s: [" << format_seconds(r.saturation_window.first) << ", "
        << format_seconds(r.saturation_window.second) << "]\n";
    out << "saturation_utilization: " << fraction(r.saturation_utilization) << "\n";
    if (r.littles_law) {
        out << "littles_law: L=" << fraction(r.littles_law->mean_in_system)
            << " lambda=" << fraction(r.littles_law->throughput) << "/s W=" << format_seconds(r.littles_law->mean_residence_s)
            << "s completions=" << r.littles_law->completions << " relative_error=" << fraction(r.littles_law->relative_error)
            << "\n";
    } else {
        out << "littles_law: n/a\n";
    }
    out << "events: " << r.events << "\n";
    out << "status_messages: published=" << r.status_published << " consumed=" << r.status_consumed << "\n";
    out << "invariant_violations: " << r.invariant_violations << "\n";
    out << "\nbatch,runs,median_wait_s,p95_wait_s\n";
    for (const auto& b : r.batches)
        out << b.batch_index << "," << b.runs << "," << format_seconds(b.median_wait_s) << ","
            << format_seconds(b.p95_wait_s) << "\n";
    return out.str();
}

void write_runs_csv(std::ostream& out, const std::vector<WorkflowRun>& runs) {
    out << "run_id,submitted_at_s,accepted_at_s,finished_at_s,state,retry_count,failure_reason\n";
    for (const auto& r : runs) {
        out << r.run_id << "," << opt_seconds(r.submitted_at) << "," << opt_seconds(r.accepted_at) << ","
            << opt_seconds(r.finished_at) << "," << to_string(r.state) << "," << r.retry_count << ","
            << r.failure_reason << "\n";
    }
}

void write_pods_csv(std::ostream& out, const ClusterState& cluster) {
    out << "pod_id,run_id,kind,step_id,created_at_s,bound_at_s,started_at_s,finished_at_s,deleted_at_s,node_id\n";
    for (const auto& p : cluster.pods()) {
        out << p.id << "," << p.run_id << "," << to_string(p.kind) << "," << p.step_id << ","
            << opt_seconds(p.created_at) << "," << opt_seconds(p.bound_at) << "," << opt_seconds(p.started_at) << ","
            << opt_seconds(p.finished_at) << "," << opt_seconds(p.deleted_at) << ","
            << (p.placed_on ? cluster.nodes()[*p.placed_on].id : std::string()) << "\n";
    }
}

void write_utilization_csv(std::ostream& out, const Simulation& sim) {
    out << "time_s,pool,node_id,alloc_millicores,capacity_millicores,fraction\n";
    const auto& log = sim.cluster().allocation_log();
    const auto& samples = sim.samples();

    auto write_change = [&](std::size_t i) {
        const auto& c = log[i];
        const auto cap = sim.cluster().pool_capacity(c.pool).millicores;
        out << format_seconds(c.time_s) << "," << to_string(c.pool) << ",ALL," << c.allocated.millicores << "," << cap
            << "," << fraction(cap > 0 ? static_cast<double>(c.allocated.millicores) / cap : 0.0) << "\n";
    };
    auto write_sample = [&](const UtilizationSample& s) {
        for (const auto& n : s.per_node)
            out << format_seconds(s.time_s) << "," << to_string(s.pool) << "," << n.node_id << ","
                << n.allocated_millicores << "," << n.capacity_millicores << "," << fraction(n.fraction) << "\n";
    };
    // Only the last change per (time, pool) run is written.
    auto last_of_run = [&](std::size_t i) {
        return i + 1 == log.size() || log[i + 1].time_s != log[i].time_s || log[i + 1].pool != log[i].pool;
    };

    std::size_t i = 0, j = 0;
    while (i < log.size() || j < samples.size()) {
        if (j == samples.size() || (i < log.size() && log[i].time_s <= samples[j].time_s)) {
            if (last_of_run(i)) write_change(i);
            ++i;
        } else {
            write_sample(samples[j++]);
        }
    }
}

void write_events_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << "seq,time_s,event,subject\n";
    for (const auto& t : trace) out << t.seq << "," << format_seconds(t.time_s) << "," << t.event << "," << t.subject << "\n";
}

void write_outputs(const Simulation& sim, const ScenarioReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        auto out = open_output(out_dir / "runs.csv");
        write_runs_csv(out, sim.scheduler().runs());
    }
    {
        auto out = open_output(out_dir / "pods.csv");
        write_pods_csv(out, sim.cluster());
    }
    {
        auto out = open_output(out_dir / "utilization.csv");
        write_utilization_csv(out, sim);
    }
    {
        auto out = open_output(out_dir / "events.csv");
        write_events_csv(out, sim.trace());
    }
    auto out = open_output(out_dir / "summary.txt");
    out << format_summary(report);
}

int run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
    Simulation sim(config);
    sim.run();
    const ScenarioReport report = analyze(sim);
    write_outputs(sim, report, out_dir);
    return report.exit_code();
}

}  // namespace wfsim
