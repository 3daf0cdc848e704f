#include "asuman/random.hpp"

#include <cmath>

namespace asuman {

double RandomStream::exponential(double rate) {
    // 1 - u lies in (0, 1], so the log is finite.
    return -std::log1p(-uniform()) / rate;
}

std::size_t RandomStream::index(std::size_t bound) {
    const auto range = static_cast<std::uint64_t>(bound);
    // Reject the low 2^64 mod range values so the remainder is unbiased.
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t x = engine_();
    while (x < threshold) x = engine_();
    return static_cast<std::size_t>(x % range);
}

} // namespace asuman
