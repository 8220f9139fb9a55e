#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace wfsim {

/// Virtual time in seconds.
using Seconds = double;

/// A (cores, memory) pair. Cores are in millicores, memory in MiB.
struct Resources {
    std::int64_t millicores = 0;
    std::int64_t memory_mib = 0;

    friend Resources operator+(Resources a, Resources b) {
        return {a.millicores + b.millicores, a.memory_mib + b.memory_mib};
    }
    friend Resources operator-(Resources a, Resources b) {
        return {a.millicores - b.millicores, a.memory_mib - b.memory_mib};
    }
    Resources& operator+=(Resources o) { return *this = *this + o; }
    Resources& operator-=(Resources o) { return *this = *this - o; }
    friend bool operator==(Resources, Resources) = default;

    /// Component-wise <=.
    bool fits_within(Resources capacity) const {
        return millicores <= capacity.millicores && memory_mib <= capacity.memory_mib;
    }
};

enum class Pool { orchestration, jobs };

constexpr std::string_view to_string(Pool p) {
    return p == Pool::orchestration ? "orchestration" : "jobs";
}

using PodIndex = std::size_t;
using RunIndex = std::size_t;

}  // namespace wfsim
