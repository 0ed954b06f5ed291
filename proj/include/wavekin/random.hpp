#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace wavekin {

// SplitMix64 (Steele, Lea & Flood, 2014): the n-th output is a fixed mixing
// function of seed + n * 0x9e3779b97f4a7c15, so streams are reproducible in
// any language and can be split by deriving child seeds.
class SplitMix64 {
public:
    static constexpr std::string_view name = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double uniform_open_low() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    // Exponential variate by inversion.
    double exponential(double mean) { return -mean * std::log(uniform_open_low()); }

    // Seed of an independent child stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream)
    {
        return mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL));
    }

    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

} // namespace wavekin
