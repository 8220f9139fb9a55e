#include "wfsim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view to_string(PodKind k) { return k == PodKind::orchestrator ? "orchestrator" : "job"; }

std::string_view to_string(PodState s) {
    switch (s) {
        case PodState::pending: return "PENDING";
        case PodState::bound: return "BOUND";
        case PodState::running: return "RUNNING";
        case PodState::succeeded: return "SUCCEEDED";
        case PodState::deleted: return "DELETED";
    }
    return "?";
}

int NodeUtilization::percent() const {
    if (capacity_millicores <= 0) return 0;
    return static_cast<int>(allocated_millicores * 100 / capacity_millicores);
}

ClusterState::ClusterState(const std::vector<PoolSpec>& pools, Seconds bind_delay_seconds)
    : bind_delay_(bind_delay_seconds) {
    if (!(bind_delay_seconds >= 0)) throw NegativeDelay("bind delay must be >= 0");
    for (const auto& spec : pools) {
        pending_[spec.pool];
        pool_allocated_[spec.pool];
        for (int i = 0; i < spec.node_count; ++i) {
            char id[64];
            std::snprintf(id, sizeof id, "%s-node-%03d", std::string(to_string(spec.pool)).c_str(), i + 1);
            pool_nodes_[spec.pool].push_back(nodes_.size());
            nodes_.push_back(Node{id, spec.pool, spec.node_capacity, {}});
        }
    }
    node_pods_.resize(nodes_.size());
}

Resources ClusterState::pool_capacity(Pool pool) const {
    Resources total;
    if (auto it = pool_nodes_.find(pool); it != pool_nodes_.end())
        for (std::size_t n : it->second) total += nodes_[n].capacity;
    return total;
}

PodIndex ClusterState::create_pod(Clock& clock, std::string run_id, PodKind kind, std::string step_id,
                                  Resources request) {
    const Pool pool = kind == PodKind::orchestrator ? Pool::orchestration : Pool::jobs;
    if (request.millicores <= 0 || request.memory_mib <= 0)
        throw RequestExceedsLargestNode("pod request must be positive in both dimensions");
    auto it = pool_nodes_.find(pool);
    const bool could_fit = it != pool_nodes_.end() &&
                           std::any_of(it->second.begin(), it->second.end(), [&](std::size_t n) {
                               return request.fits_within(nodes_[n].capacity);
                           });
    if (!could_fit) {
        throw RequestExceedsLargestNode("request of " + std::to_string(request.millicores) + "m/" +
                                        std::to_string(request.memory_mib) + "Mi exceeds every " +
                                        std::string(to_string(pool)) + " node");
    }

    Pod pod;
    pod.id = run_id + "/" + (kind == PodKind::orchestrator ? std::string("orchestrator") : step_id);
    pod.run_id = std::move(run_id);
    pod.kind = kind;
    pod.step_id = std::move(step_id);
    pod.pool = pool;
    pod.request = request;
    pod.created_at = clock.now();
    pod.bind_eligible_at = clock.now() + bind_delay_;

    const PodIndex index = pods_.size();
    pods_.push_back(std::move(pod));
    pending_[pool].push_back(index);
    request_bind_attempt(clock, pool, bind_delay_);
    return index;
}

std::optional<std::size_t> ClusterState::try_bind(Clock& clock, PodIndex index) {
    Pod& pod = pods_.at(index);
    if (pod.state != PodState::pending || pod.bind_eligible_at > clock.now()) return std::nullopt;
    for (std::size_t n : pool_nodes_[pod.pool]) {
        if (!pod.request.fits_within(nodes_[n].free())) continue;
        erase_pending(index);
        allocate(clock, pod, n);
        pod.state = PodState::bound;
        pod.node = n;
        pod.placed_on = n;
        pod.bound_at = clock.now();
        node_pods_[n].push_back(index);
        return n;
    }
    return std::nullopt;
}

std::vector<PodIndex> ClusterState::bind_pending(Clock& clock, Pool pool) {
    scheduled_attempts_.erase({clock.now(), pool});
    std::vector<PodIndex> bound;
    auto& fifo = pending_[pool];
    while (!fifo.empty()) {
        const PodIndex head = fifo.front();
        if (!try_bind(clock, head)) break;
        bound.push_back(head);
    }
    return bound;
}

void ClusterState::start_pod(Clock& clock, PodIndex index) {
    Pod& pod = pods_.at(index);
    if (pod.state != PodState::bound)
        throw InconsistentState("pod " + pod.id + " started while " + std::string(to_string(pod.state)));
    pod.state = PodState::running;
    pod.started_at = clock.now();
}

void ClusterState::complete_pod(Clock& clock, PodIndex index) {
    Pod& pod = pods_.at(index);
    if (pod.state != PodState::running)
        throw InconsistentState("pod " + pod.id + " completed while " + std::string(to_string(pod.state)));
    deallocate(clock, pod);
    pod.state = PodState::succeeded;
    pod.finished_at = clock.now();
    request_bind_attempt(clock, pod.pool, 0);
}

void ClusterState::release_pod(Clock& clock, PodIndex index) {
    Pod& pod = pods_.at(index);
    switch (pod.state) {
        case PodState::deleted:
            throw DoubleRelease("pod " + pod.id + " already deleted");
        case PodState::pending:
            erase_pending(index);
            break;
        case PodState::bound:
        case PodState::running:
            deallocate(clock, pod);
            if (!pod.finished_at) pod.finished_at = clock.now();
            request_bind_attempt(clock, pod.pool, 0);
            break;
        case PodState::succeeded:
            break;
    }
    if (pod.node) {
        auto& on_node = node_pods_[*pod.node];
        on_node.erase(std::remove(on_node.begin(), on_node.end(), index), on_node.end());
        touched_nodes_.insert(*pod.node);
    }
    pod.node.reset();
    pod.state = PodState::deleted;
    pod.deleted_at = clock.now();
}

Resources ClusterState::free_resources(Pool pool) const {
    return pool_capacity(pool) - pool_allocated_.at(pool);
}

UtilizationSample ClusterState::utilization_sample(Pool pool, Seconds now) const {
    UtilizationSample sample;
    sample.time_s = now;
    sample.pool = pool;
    std::int64_t alloc = 0, cap = 0;
    if (auto it = pool_nodes_.find(pool); it != pool_nodes_.end()) {
        for (std::size_t n : it->second) {
            const Node& node = nodes_[n];
            NodeUtilization u{node.id, node.allocated.millicores, node.capacity.millicores, 0.0};
            u.fraction = u.capacity_millicores > 0
                             ? static_cast<double>(u.allocated_millicores) / u.capacity_millicores
                             : 0.0;
            alloc += u.allocated_millicores;
            cap += u.capacity_millicores;
            sample.per_node.push_back(std::move(u));
        }
    }
    sample.aggregate_fraction = cap > 0 ? static_cast<double>(alloc) / cap : 0.0;
    return sample;
}

std::vector<std::string> ClusterState::check_conservation() {
    std::vector<std::string> violations;
    for (std::size_t n : touched_nodes_) {
        const Node& node = nodes_[n];
        Resources live;
        for (PodIndex p : node_pods_[n])
            if (pods_[p].holds_allocation()) live += pods_[p].request;
        if (live != node.allocated) {
            violations.push_back(node.id + ": allocated " + std::to_string(node.allocated.millicores) + "m/" +
                                 std::to_string(node.allocated.memory_mib) + "Mi but live pods request " +
                                 std::to_string(live.millicores) + "m/" + std::to_string(live.memory_mib) + "Mi");
        }
        if (!node.allocated.fits_within(node.capacity) || node.allocated.millicores < 0 ||
            node.allocated.memory_mib < 0) {
            violations.push_back(node.id + ": allocation outside [0, capacity]");
        }
    }
    touched_nodes_.clear();
    return violations;
}

void ClusterState::allocate(Clock& clock, Pod& pod, std::size_t node) {
    nodes_[node].allocated += pod.request;
    pool_allocated_[pod.pool] += pod.request;
    touched_nodes_.insert(node);
    log_allocation(clock.now(), pod.pool);
}

void ClusterState::deallocate(Clock& clock, Pod& pod) {
    const std::size_t node = pod.node.value();
    nodes_[node].allocated -= pod.request;
    pool_allocated_[pod.pool] -= pod.request;
    touched_nodes_.insert(node);
    log_allocation(clock.now(), pod.pool);
}

void ClusterState::request_bind_attempt(Clock& clock, Pool pool, Seconds delay) {
    const Seconds at = clock.now() + delay;
    if (scheduled_attempts_.insert({at, pool}).second) clock.schedule(delay, event::PodBindAttempt{pool});
}

void ClusterState::log_allocation(Seconds now, Pool pool) {
    allocation_log_.push_back(AllocationChange{now, pool, pool_allocated_[pool]});
}

void ClusterState::erase_pending(PodIndex index) {
    auto& fifo = pending_[pods_[index].pool];
    if (!fifo.empty() && fifo.front() == index) {
        fifo.pop_front();
        return;
    }
    fifo.erase(std::remove(fifo.begin(), fifo.end(), index), fifo.end());
}

}  // namespace wfsim
