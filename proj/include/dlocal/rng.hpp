#pragma once

#include <cstdint>
#include <limits>

namespace dlocal
{
    /// SplitMix64 finalizer. Bit-identical on every platform.
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Derives an independent stream seed from a parent seed and two coordinates.
    constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept
    {
        return mix64(mix64(mix64(seed) ^ (a * 0xd1b54a32d192ed03ULL)) ^ (b * 0x8cb92ba72f3d8dd7ULL));
    }

    /// Portable seeded generator (SplitMix64 stream).
    ///
    /// The standard distributions are implementation-defined, so every bounded draw
    /// in this library goes through uniform_below() instead.
    class Rng
    {
    public:
        using result_type = std::uint64_t;

        explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

        static constexpr result_type min() noexcept { return 0; }
        static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

        result_type operator()() noexcept
        {
            state_ += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = state_;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        /// Uniform integer in [0, bound). bound must be positive.
        std::uint64_t uniform_below(std::uint64_t bound) noexcept
        {
            if (bound <= 1)
                return 0;
            const std::uint64_t limit = max() - (max() - bound + 1) % bound;
            for (;;)
            {
                const std::uint64_t x = (*this)();
                if (x <= limit)
                    return x % bound;
            }
        }

        /// Uniform double in [0, 1) with 53 random bits.
        double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

        bool coin() noexcept { return ((*this)() >> 63) != 0; }

    private:
        std::uint64_t state_;
    };

} // namespace dlocal
