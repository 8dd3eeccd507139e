#pragma once

#include <cstdint>
#include <random>

namespace pes {

// SplitMix64 step, used to whiten seed material before it reaches a
// mt19937_64. Distinct (master, point, frame) triples give streams that
// are independent for Monte-Carlo purposes and reproducible regardless of
// how frames are distributed over workers.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t master, std::uint64_t point, std::uint64_t frame)
{
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(point));
    s = splitmix64(s ^ splitmix64(frame));
    return std::mt19937_64(s);
}

}
