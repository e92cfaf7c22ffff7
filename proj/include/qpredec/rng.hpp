#pragma once

#include <cstdint>
#include <vector>

namespace qpredec {

// Deterministic, platform-independent PRNG (splitmix64). All randomness in
// the toolchain flows through this so results are byte-identical across
// compilers and standard libraries.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n).
    uint64_t next_below(uint64_t n) { return n == 0 ? 0 : next() % n; }
};

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
    return g.next();
}

// Independent per-shot stream; schedule-invariant under any parallel split.
inline SplitMix64 shot_stream(uint64_t experiment_seed, uint64_t shot_index) {
    return SplitMix64(mix_seed(experiment_seed, shot_index));
}

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& g) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(g.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace qpredec
