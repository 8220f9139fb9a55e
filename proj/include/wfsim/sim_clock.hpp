#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string_view>
#include <variant>
#include <vector>

#include "wfsim/types.hpp"

namespace wfsim {

namespace event {

struct WorkflowSubmitted {
    int batch_index = 0;
};
struct ScheduleTick {};
struct PodBindAttempt {
    Pool pool = Pool::jobs;
};
struct PodStarted {
    PodIndex pod = 0;
};
struct JobCompleted {
    PodIndex pod = 0;
};
struct StatusMessage {
    std::uint64_t message = 0;
};
struct TerminationProcessed {
    RunIndex run = 0;
};
struct MetricsSample {};
struct LoadBatch {
    int batch_index = 0;
};

}  // namespace event

using Payload = std::variant<event::WorkflowSubmitted, event::ScheduleTick, event::PodBindAttempt,
                             event::PodStarted, event::JobCompleted, event::StatusMessage,
                             event::TerminationProcessed, event::MetricsSample, event::LoadBatch>;

std::string_view payload_name(const Payload& p);

struct Event {
    Seconds fire_at = 0;
    std::uint64_t seq = 0;
    Payload payload;
};

/// Virtual clock plus future-event list. Events pop in (fire_at, seq) order;
/// seq is assigned at scheduling time and never reused, so events scheduled
/// for the same instant fire in scheduling order.
class Clock {
public:
    using Dispatcher = std::function<void(const Event&)>;

    Seconds now() const noexcept { return now_; }
    std::size_t pending() const noexcept { return queue_.size(); }
    std::uint64_t next_seq() const noexcept { return next_seq_; }

    /// Throws NegativeDelay for delay < 0 or NaN.
    std::uint64_t schedule(Seconds delay, Payload payload);

    /// Dispatches every event with fire_at <= t_end. Handlers may schedule
    /// more events. The clock reads t_end on return. A throwing handler is
    /// reported as HandlerFailure carrying the event's seq and time.
    std::size_t run_until(Seconds t_end, const Dispatcher& dispatch);

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
        }
    };

    Seconds now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace wfsim
