// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace invren {

// splitmix64: used to hash (seed, pixel, iteration) tuples into decorrelated
// PCG stream initializers. Deterministic across platforms.
inline uint64_t hash_mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return hash_mix(a ^ (0x9e3779b97f4a7c15ull + b + (a << 6) + (a >> 2)));
}

// PCG32 (O'Neill). Small, fast, reproducible.
class Rng {
public:
    Rng() { seed(0x853c49e6748fea9bull, 0xda3e39cb94b95bdbull); }
    explicit Rng(uint64_t initstate, uint64_t initseq = 1) { seed(initstate, initseq); }

    // Stream decorrelated by an arbitrary key tuple.
    static Rng stream(uint64_t seed, uint64_t key0, uint64_t key1 = 0) {
        uint64_t h = hash_combine(hash_mix(seed), hash_combine(key0, key1));
        return Rng(h, hash_mix(h));
    }

    void seed(uint64_t initstate, uint64_t initseq) {
        state_ = 0u;
        inc_ = (initseq << 1u) | 1u;
        next_u32();
        state_ += initstate;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform in [0,1).
    double next_double() { return next_u32() * 0x1p-32; }

    uint32_t next_below(uint32_t n) { return static_cast<uint32_t>(next_u32() % n); }

    // Standard normal via Box-Muller.
    double next_normal() {
        double u1 = next_double(), u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    uint64_t state_, inc_;
};

}  // namespace invren
