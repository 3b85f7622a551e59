#pragma once

#include <cstdint>
#include <random>

namespace pitspec {

/// SplitMix64 finalizer; a good 64-bit mixing function.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` derived from `seed`; independent of evaluation order.
[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a,
                                                  std::uint64_t b) noexcept {
    return stream_seed(stream_seed(seed, a), b);
}

/// Uniform draws strictly inside (0,1) from a 64-bit Mersenne twister.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace pitspec
