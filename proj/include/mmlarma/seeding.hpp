#pragma once

#include <cstdint>
#include <initializer_list>

namespace mmlarma {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a path of indices below a master seed.  Independent of
/// evaluation order, so parallel fan-out stays reproducible.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix_seed(master);
    for (auto v : path) s = mix_seed(s ^ mix_seed(v + 0x632be59bd9b4e019ULL));
    return s;
}

}  // namespace mmlarma
