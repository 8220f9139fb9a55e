#include "wfsim/sim_clock.hpp"

#include <cmath>
#include <string>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view payload_name(const Payload& p) {
    constexpr std::string_view names[] = {"WorkflowSubmitted", "ScheduleTick",        "PodBindAttempt",
                                          "PodStarted",        "JobCompleted",        "StatusMessage",
                                          "TerminationProcessed", "MetricsSample",    "LoadBatch"};
    static_assert(std::size(names) == std::variant_size_v<Payload>);
    return names[p.index()];
}

std::uint64_t Clock::schedule(Seconds delay, Payload payload) {
    if (!(delay >= 0)) throw NegativeDelay("cannot schedule with delay " + std::to_string(delay));
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{now_ + delay, seq, std::move(payload)});
    return seq;
}

std::size_t Clock::run_until(Seconds t_end, const Dispatcher& dispatch) {
    if (t_end < now_) throw PreconditionViolated("run_until target precedes the current time");
    std::size_t processed = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.fire_at;
        try {
            dispatch(ev);
        } catch (const HandlerFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw HandlerFailure(ev.seq, ev.fire_at, std::string(payload_name(ev.payload)) + ": " + e.what());
        }
        ++processed;
    }
    now_ = t_end;
    return processed;
}

}  // namespace wfsim
