#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace asuman {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed of substream `index` under `root`. Distinct indices give unrelated
// seeds, so adding a stream never shifts the others.
constexpr std::uint64_t substream_seed(std::uint64_t root, std::uint64_t index) noexcept {
    return mix64(mix64(root) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// Portable draws on top of mt19937_64: the distributions are written out here
// so a seed reproduces the same path with any standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Exponential inter-arrival time for a Poisson process of `rate` > 0.
    double exponential(double rate);

    // Uniform integer in [0, bound), bound > 0, unbiased by rejection.
    std::size_t index(std::size_t bound);

private:
    std::mt19937_64 engine_;
};

enum class StreamId : std::uint64_t { SelfUpdate = 0, Delivery = 1, Gossip = 2 };

// The independent random streams driving one simulation run.
struct SimStreams {
    RandomStream self_update;
    RandomStream delivery;
    RandomStream gossip;

    explicit SimStreams(std::uint64_t root)
        : self_update(substream_seed(root, static_cast<std::uint64_t>(StreamId::SelfUpdate))),
          delivery(substream_seed(root, static_cast<std::uint64_t>(StreamId::Delivery))),
          gossip(substream_seed(root, static_cast<std::uint64_t>(StreamId::Gossip))) {}
};

} // namespace asuman
