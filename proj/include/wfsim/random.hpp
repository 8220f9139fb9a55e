#pragma once

#include <cstdint>
#include <random>

namespace wfsim {

/// The single seeded random stream owned by a scenario. Modules draw from it
/// through explicit calls only.
///
/// `uniform01` maps the top 53 bits of a 64-bit Mersenne Twister draw to
/// [0, 1), so a seed yields the same sequence on every standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace wfsim
