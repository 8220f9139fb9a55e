#include <random>

#include "doctest.h"

#include "wfsim/cluster.hpp"
#include "wfsim/errors.hpp"

using namespace wfsim;

namespace {

constexpr Resources kFlavour{8000, 16384};

ClusterState make_cluster(int jobs_nodes, Seconds bind_delay = 5, int orchestration_nodes = 1) {
    return ClusterState({{Pool::orchestration, orchestration_nodes, kFlavour}, {Pool::jobs, jobs_nodes, kFlavour}},
                        bind_delay);
}

// Runs every pending event; PodBindAttempt drives bind_pending.
std::vector<PodIndex> drain(Clock& clock, ClusterState& cluster, Seconds until) {
    std::vector<PodIndex> bound;
    clock.run_until(until, [&](const Event& e) {
        if (auto* a = std::get_if<event::PodBindAttempt>(&e.payload)) {
            for (PodIndex p : cluster.bind_pending(clock, a->pool)) bound.push_back(p);
        }
    });
    return bound;
}

}  // namespace

TEST_CASE("create_pod queues a pending pod and schedules a bind attempt") {
    Clock clock;
    auto cluster = make_cluster(2);
    const PodIndex p = cluster.create_pod(clock, "run-1", PodKind::job, "ntuple-1", {1000, 2000});
    CHECK(cluster.pod(p).state == PodState::pending);
    CHECK(cluster.pod(p).id == "run-1/ntuple-1");
    CHECK(cluster.pending(Pool::jobs).size() == 1);
    CHECK(cluster.pod(p).bind_eligible_at == 5);
    REQUIRE(clock.pending() == 1);

    // Not eligible before the bind delay elapses.
    clock.run_until(4.9, [](const Event&) {});
    CHECK_FALSE(cluster.try_bind(clock, p));

    const auto bound = drain(clock, cluster, 10);
    REQUIRE(bound.size() == 1);
    CHECK(cluster.pod(p).state == PodState::bound);
    CHECK(*cluster.pod(p).bound_at == 5);
    CHECK(cluster.pending(Pool::jobs).empty());
}

TEST_CASE("orchestrator pods go to the orchestration pool") {
    Clock clock;
    auto cluster = make_cluster(2);
    const PodIndex p = cluster.create_pod(clock, "run-1", PodKind::orchestrator, "", {100, 256});
    CHECK(cluster.pod(p).pool == Pool::orchestration);
    CHECK(cluster.pending(Pool::orchestration).size() == 1);
    CHECK(cluster.pending(Pool::jobs).empty());
    drain(clock, cluster, 5);
    CHECK(cluster.nodes()[*cluster.pod(p).node].id == "orchestration-node-001");
}

TEST_CASE("requests larger than any node fail fast") {
    Clock clock;
    auto cluster = make_cluster(2);
    CHECK_THROWS_AS(cluster.create_pod(clock, "r", PodKind::job, "big", {9000, 100}), RequestExceedsLargestNode);
    CHECK_THROWS_AS(cluster.create_pod(clock, "r", PodKind::job, "fat", {100, 20000}), RequestExceedsLargestNode);
    CHECK(cluster.pods().empty());
}

TEST_CASE("first fit by ascending node id") {
    Clock clock;
    auto cluster = make_cluster(2, 0);
    const PodIndex big = cluster.create_pod(clock, "r", PodKind::job, "a", {7800, 1000});
    drain(clock, cluster, 0);
    CHECK(cluster.nodes()[*cluster.pod(big).node].id == "jobs-node-001");

    // node-001 now has 200 mc left; a 2000 mc pod must go to node-002
    const PodIndex next = cluster.create_pod(clock, "r", PodKind::job, "b", {2000, 1000});
    drain(clock, cluster, 0);
    CHECK(cluster.nodes()[*cluster.pod(next).node].id == "jobs-node-002");
}

TEST_CASE("twelve 7800m pods fill twelve nodes at 97.5%") {
    Clock clock;
    auto cluster = make_cluster(12, 0);
    for (int i = 0; i < 12; ++i) cluster.create_pod(clock, "r", PodKind::job, "s" + std::to_string(i), {7800, 1000});
    CHECK(drain(clock, cluster, 0).size() == 12);
    const auto sample = cluster.utilization_sample(Pool::jobs, clock.now());
    for (const auto& n : sample.per_node) CHECK(n.allocated_millicores == 7800);
    CHECK(sample.aggregate_fraction == doctest::Approx(7800.0 / 8000.0));
    CHECK(sample.per_node[0].percent() == 97);
}

TEST_CASE("head-of-line blocking keeps FIFO order") {
    Clock clock;
    auto cluster = make_cluster(1, 0);
    cluster.create_pod(clock, "r", PodKind::job, "a", {6000, 1000});
    drain(clock, cluster, 0);
    const PodIndex blocked = cluster.create_pod(clock, "r", PodKind::job, "b", {4000, 1000});
    const PodIndex small = cluster.create_pod(clock, "r", PodKind::job, "c", {1000, 1000});
    CHECK(drain(clock, cluster, 0).empty());  // c would fit but b is ahead of it
    CHECK(cluster.pod(blocked).state == PodState::pending);
    CHECK(cluster.pod(small).state == PodState::pending);
    CHECK(cluster.pending(Pool::jobs).front() == blocked);
}

TEST_CASE("completion frees resources and rescans the queue at the same instant") {
    Clock clock;
    auto cluster = make_cluster(1, 5);
    const PodIndex running = cluster.create_pod(clock, "r", PodKind::job, "a", {8000, 1000});
    drain(clock, cluster, 5);
    cluster.start_pod(clock, running);
    std::vector<PodIndex> waiting;
    for (int i = 0; i < 3; ++i) waiting.push_back(cluster.create_pod(clock, "r", PodKind::job, "w" + std::to_string(i), {2000, 1000}));
    CHECK(drain(clock, cluster, 50).empty());

    clock.run_until(100, [](const Event&) {});
    cluster.complete_pod(clock, running);
    CHECK(cluster.pod(running).state == PodState::succeeded);
    CHECK(cluster.pod(running).node.has_value());
    CHECK(cluster.free_resources(Pool::jobs) == Resources{8000, 16384});
    const auto bound = drain(clock, cluster, 100);
    CHECK(bound == waiting);
    for (PodIndex p : waiting) CHECK(*cluster.pod(p).bound_at == 100);
}

TEST_CASE("release returns allocations and rejects double release") {
    Clock clock;
    auto cluster = make_cluster(1, 0);
    const PodIndex p = cluster.create_pod(clock, "r", PodKind::job, "a", {3000, 5000});
    drain(clock, cluster, 0);
    cluster.start_pod(clock, p);
    CHECK(cluster.nodes()[1].allocated == Resources{3000, 5000});
    cluster.release_pod(clock, p);
    CHECK(cluster.nodes()[1].allocated == Resources{0, 0});
    CHECK(cluster.pod(p).state == PodState::deleted);
    CHECK_FALSE(cluster.pod(p).node.has_value());
    CHECK(cluster.pod(p).placed_on.has_value());
    CHECK_THROWS_AS(cluster.release_pod(clock, p), DoubleRelease);
    CHECK(cluster.check_conservation().empty());
}

TEST_CASE("releasing a pending pod removes it from the queue") {
    Clock clock;
    auto cluster = make_cluster(1, 5);
    const PodIndex a = cluster.create_pod(clock, "r", PodKind::job, "a", {1000, 1000});
    const PodIndex b = cluster.create_pod(clock, "r", PodKind::job, "b", {1000, 1000});
    cluster.release_pod(clock, a);
    CHECK(cluster.pending(Pool::jobs) == std::deque<PodIndex>{b});
}

TEST_CASE("free resources of the 448-core pool") {
    Clock clock;
    auto cluster = make_cluster(56, 0);
    CHECK(cluster.free_resources(Pool::jobs) == Resources{448000, 917504});
    cluster.create_pod(clock, "r", PodKind::job, "a", {1000, 2000});
    CHECK(cluster.free_resources(Pool::jobs) == Resources{448000, 917504});  // pending is not subtracted
    drain(clock, cluster, 0);
    CHECK(cluster.free_resources(Pool::jobs) == Resources{447000, 915504});

    auto full = make_cluster(1, 0);
    full.create_pod(clock, "r", PodKind::job, "x", kFlavour);
    drain(clock, full, 0);
    CHECK(full.free_resources(Pool::jobs) == Resources{0, 0});
}

TEST_CASE("kubectl-style percentages match the listed node snapshot") {
    // (allocated millicores, listed CPU%) for the twelve listed nodes
    const std::pair<int, int> listing[] = {{7858, 98}, {7848, 98}, {7846, 98}, {7773, 97}, {7864, 98}, {7843, 98},
                                           {7376, 92}, {7817, 97}, {7748, 96}, {7854, 98}, {7868, 98}, {7787, 97}};
    double fraction_sum = 0;
    for (auto [mc, pct] : listing) {
        NodeUtilization n{"n", mc, 8000, mc / 8000.0};
        CHECK(n.percent() == pct);
        fraction_sum += mc / 8000.0;
    }
    const double oracle = fraction_sum / 12.0;  // mean of per-node fractions
    CHECK(oracle == doctest::Approx(0.9738).epsilon(1e-4));

    Clock clock;
    auto cluster = make_cluster(12, 0);
    int i = 0;
    for (auto [mc, pct] : listing) cluster.create_pod(clock, "r", PodKind::job, "s" + std::to_string(i++), {mc, 1000});
    drain(clock, cluster, 0);
    const auto sample = cluster.utilization_sample(Pool::jobs, 0);
    CHECK(sample.aggregate_fraction == doctest::Approx(oracle));
    CHECK(sample.per_node[0].percent() == 98);
}

TEST_CASE("empty pool utilization is zero") {
    auto cluster = make_cluster(3);
    const auto s = cluster.utilization_sample(Pool::jobs, 12);
    CHECK(s.aggregate_fraction == 0);
    CHECK(s.time_s == 12);
    CHECK(s.per_node.size() == 3);
}

TEST_CASE("conservation holds through random create/bind/complete/release") {
    Clock clock;
    auto cluster = make_cluster(4, 1);
    std::mt19937 rng(1);
    std::vector<PodIndex> live;
    for (int step = 0; step < 2000; ++step) {
        const int action = static_cast<int>(rng() % 4);
        if (action == 0) {
            live.push_back(cluster.create_pod(clock, "r", PodKind::job, "s" + std::to_string(step),
                                              {static_cast<std::int64_t>(1 + rng() % 8000),
                                               static_cast<std::int64_t>(1 + rng() % 16384)}));
        } else if (action == 1 && !live.empty()) {
            const PodIndex p = live[rng() % live.size()];
            if (cluster.pod(p).state == PodState::bound) cluster.start_pod(clock, p);
            else if (cluster.pod(p).state == PodState::running) cluster.complete_pod(clock, p);
        } else if (action == 2 && !live.empty()) {
            const std::size_t k = rng() % live.size();
            cluster.release_pod(clock, live[k]);
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            drain(clock, cluster, clock.now() + 1);
        }
        CHECK(cluster.check_conservation().empty());
        for (const auto& n : cluster.nodes()) CHECK(n.allocated.fits_within(n.capacity));
    }
    for (const auto& p : cluster.pods()) {
        if (p.bound_at) CHECK(*p.created_at <= *p.bound_at);
        if (p.started_at) CHECK(*p.bound_at <= *p.started_at);
        if (p.finished_at && p.started_at) CHECK(*p.started_at <= *p.finished_at);
    }
}
