#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfsim/sim_clock.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

struct Node {
    std::string id;
    Pool pool = Pool::jobs;
    Resources capacity;
    Resources allocated;

    Resources free() const { return capacity - allocated; }
};

enum class PodKind { orchestrator, job };
enum class PodState { pending, bound, running, succeeded, deleted };

std::string_view to_string(PodKind k);
std::string_view to_string(PodState s);

struct Pod {
    std::string id;
    std::string run_id;
    PodKind kind = PodKind::job;
    std::string step_id;  // empty for orchestrator pods
    Pool pool = Pool::jobs;
    Resources request;
    PodState state = PodState::pending;
    std::optional<std::size_t> node;       // set while BOUND, RUNNING or SUCCEEDED
    std::optional<std::size_t> placed_on;  // node the pod was bound to, kept after deletion
    Seconds bind_eligible_at = 0;
    std::optional<Seconds> created_at, bound_at, started_at, finished_at, deleted_at;

    /// Whether the pod currently holds node resources.
    bool holds_allocation() const { return state == PodState::bound || state == PodState::running; }
};

struct PoolSpec {
    Pool pool = Pool::jobs;
    int node_count = 0;
    Resources node_capacity;
};

struct NodeUtilization {
    std::string node_id;
    std::int64_t allocated_millicores = 0;
    std::int64_t capacity_millicores = 0;
    double fraction = 0;

    /// Integer percent, truncated the way `kubectl top nodes` lists it.
    int percent() const;
};

struct UtilizationSample {
    Seconds time_s = 0;
    Pool pool = Pool::jobs;
    double aggregate_fraction = 0;  // sum(allocated) / sum(capacity)
    std::vector<NodeUtilization> per_node;
};

/// Pool-level allocation after every change, for exact time averages.
struct AllocationChange {
    Seconds time_s = 0;
    Pool pool = Pool::jobs;
    Resources allocated;
};

/// Simulated cluster. Pods are placed first-fit by ascending node id, one
/// pending FIFO per pool, with head-of-line blocking: a scan stops at the
/// first pending pod that is not yet eligible or does not fit anywhere.
///
/// Mutating operations take the clock so they can schedule the follow-up
/// PodBindAttempt events. Bind attempts are coalesced per (pool, instant).
class ClusterState {
public:
    ClusterState(const std::vector<PoolSpec>& pools, Seconds bind_delay_seconds);

    Seconds bind_delay() const noexcept { return bind_delay_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Pod>& pods() const noexcept { return pods_; }
    const Pod& pod(PodIndex i) const { return pods_.at(i); }
    const std::deque<PodIndex>& pending(Pool pool) const { return pending_.at(pool); }
    Resources pool_capacity(Pool pool) const;
    const std::vector<AllocationChange>& allocation_log() const noexcept { return allocation_log_; }

    /// New PENDING pod queued at the tail of its pool's FIFO; a bind attempt
    /// fires after the bind delay. Throws RequestExceedsLargestNode when no
    /// node of the pool could hold the request even when empty.
    PodIndex create_pod(Clock& clock, std::string run_id, PodKind kind, std::string step_id, Resources request);

    /// First-fit placement of one pending, eligible pod. On success the pod is
    /// BOUND (resources allocated) and removed from the FIFO.
    std::optional<std::size_t> try_bind(Clock& clock, PodIndex pod);

    /// Binds pending pods of `pool` in FIFO order until the head cannot bind.
    /// Returns the pods that were bound, in binding order. This is the
    /// PodBindAttempt handler.
    std::vector<PodIndex> bind_pending(Clock& clock, Pool pool);

    /// BOUND -> RUNNING, started_at = now.
    void start_pod(Clock& clock, PodIndex pod);

    /// RUNNING -> SUCCEEDED; node resources are returned immediately and a
    /// bind attempt is scheduled for the pool.
    void complete_pod(Clock& clock, PodIndex pod);

    /// Any state -> DELETED. Returns held resources to the node and triggers a
    /// rescan of the pool. Throws DoubleRelease if already DELETED.
    void release_pod(Clock& clock, PodIndex pod);

    /// Sum of (capacity - allocated) over the pool; pending requests are not
    /// subtracted.
    Resources free_resources(Pool pool) const;

    UtilizationSample utilization_sample(Pool pool, Seconds now) const;

    /// Recomputes every touched node's allocation from its pods' states and
    /// capacity. Returns a description of each violation; clears the touched
    /// set.
    std::vector<std::string> check_conservation();

private:
    void allocate(Clock& clock, Pod& pod, std::size_t node);
    void deallocate(Clock& clock, Pod& pod);
    void request_bind_attempt(Clock& clock, Pool pool, Seconds delay);
    void log_allocation(Seconds now, Pool pool);
    void erase_pending(PodIndex pod);

    Seconds bind_delay_;
    std::vector<Node> nodes_;
    std::map<Pool, std::vector<std::size_t>> pool_nodes_;
    std::map<Pool, Resources> pool_allocated_;
    std::map<Pool, std::deque<PodIndex>> pending_;
    std::vector<Pod> pods_;
    std::vector<std::vector<PodIndex>> node_pods_;
    std::set<std::pair<Seconds, Pool>> scheduled_attempts_;
    std::set<std::size_t> touched_nodes_;
    std::vector<AllocationChange> allocation_log_;
};

}  // namespace wfsim
