#include "wfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view to_string(Verdict v) { return v == Verdict::overloaded ? "Overloaded" : "Sustainable"; }

std::vector<RunMetrics> collect_run_metrics(std::span<const WorkflowRun> runs, Seconds horizon) {
    std::vector<RunMetrics> out;
    out.reserve(runs.size());
    for (const auto& run : runs) {
        RunMetrics m{run.run_id, run.batch_index, 0, 0, run.state, false};
        const Seconds submitted = run.submitted_at.value_or(0);
        if (run.accepted_at) {
            m.scheduling_wait_s = *run.accepted_at - submitted;
        } else if (run.state == RunState::failed && run.finished_at) {
            m.scheduling_wait_s = *run.finished_at - submitted;
        } else {
            m.scheduling_wait_s = horizon - submitted;
            m.wait_censored = true;
        }
        if (auto rt = run.run_time()) m.run_time_s = *rt;
        out.push_back(std::move(m));
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw EmptyBatch("median of an empty set");
    const std::size_t n = values.size();
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyBatch("percentile of an empty set");
    if (!(p > 0 && p <= 100)) throw PreconditionViolated("percentile must lie in (0, 100]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

std::vector<BatchWaitStats> batch_wait_series(std::span<const RunMetrics> runs) {
    std::map<int, std::vector<double>> by_batch;
    for (const auto& r : runs) by_batch[r.batch_index].push_back(r.scheduling_wait_s);
    if (by_batch.empty()) throw EmptyBatch("no runs");

    std::vector<BatchWaitStats> series;
    for (int b = by_batch.begin()->first; b <= by_batch.rbegin()->first; ++b) {
        auto it = by_batch.find(b);
        if (it == by_batch.end()) throw EmptyBatch("batch " + std::to_string(b) + " has no runs");
        series.push_back({b, it->second.size(), median(it->second), percentile_nearest_rank(it->second, 95)});
    }
    return series;
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw PreconditionViolated("slope needs >= 2 paired points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx == 0 ? 0.0 : sxy / sxx;
}

Verdict detect_overflow(std::span<const double> medians, const OverflowCriterion& criterion) {
    if (medians.size() < 4) throw TooFewBatches("overflow detection needs >= 4 batches");
    const std::size_t tail = (medians.size() + 1) / 2;
    const std::size_t first = medians.size() - tail;
    std::vector<double> xs(tail), ys(medians.begin() + static_cast<std::ptrdiff_t>(first), medians.end());
    std::iota(xs.begin(), xs.end(), static_cast<double>(first + 1));

    const bool rising = least_squares_slope(xs, ys) > criterion.slope_threshold;
    const bool grown = medians.back() >= criterion.growth_factor * medians.front() && medians.back() > 0;
    return rising && grown ? Verdict::overloaded : Verdict::sustainable;
}

Seconds expected_makespan(const WorkflowSpec& spec, Seconds bind_delay_seconds) {
    return critical_path_seconds(spec) + bind_delay_seconds * level_count(spec);
}

double required_core_capacity(const WorkflowSpec& spec, double arrival_rate_per_second, Seconds bind_delay_seconds) {
    if (!(arrival_rate_per_second > 0)) throw PreconditionViolated("arrival rate must be > 0");
    double core_seconds = 0;
    for (const auto& s : spec.steps) core_seconds += static_cast<double>(s.request.millicores) * s.duration.mean();
    core_seconds += static_cast<double>(spec.orchestrator.millicores) * expected_makespan(spec, bind_delay_seconds);
    return arrival_rate_per_second * core_seconds;
}

LittlesLaw littles_law_check(std::span<const WorkflowRun> runs, Seconds window_start, Seconds window_end,
                             Verdict verdict) {
    if (verdict != Verdict::sustainable)
        throw PreconditionViolated("Little's-law check needs a Sustainable steady-state window");
    if (!(window_end > window_start)) throw WindowTooShort("empty window");
    const double span = window_end - window_start;

    LittlesLaw out;
    double area = 0, residence = 0;
    for (const auto& run : runs) {
        if (!run.accepted_at) continue;
        const Seconds enter = *run.accepted_at;
        const Seconds leave = run.finished_at.value_or(window_end);
        area += std::max(0.0, std::min(leave, window_end) - std::max(enter, window_start));
        if (run.state == RunState::finished && leave > window_start && leave <= window_end) {
            ++out.completions;
            residence += leave - enter;
        }
    }
    if (out.completions < 10)
        throw WindowTooShort("window holds " + std::to_string(out.completions) + " completions, need >= 10");
    out.mean_in_system = area / span;
    out.throughput = static_cast<double>(out.completions) / span;
    out.mean_residence_s = residence / static_cast<double>(out.completions);
    out.relative_error = std::abs(out.mean_in_system - out.throughput * out.mean_residence_s) / out.mean_in_system;
    return out;
}

double mean_core_utilization(const ClusterState& cluster, Pool pool, Seconds t0, Seconds t1) {
    const double capacity = static_cast<double>(cluster.pool_capacity(pool).millicores);
    if (!(t1 > t0) || capacity <= 0) return 0.0;
    double level = 0, area = 0;
    Seconds cursor = t0;
    for (const auto& change : cluster.allocation_log()) {
        if (change.pool != pool) continue;
        if (change.time_s > t0) {
            const Seconds until = std::min(change.time_s, t1);
            area += level * (until - cursor);
            cursor = until;
            if (change.time_s >= t1) break;
        }
        level = static_cast<double>(change.allocated.millicores);
    }
    if (cursor < t1) area += level * (t1 - cursor);
    return area / (capacity * (t1 - t0));
}

}  // namespace wfsim
