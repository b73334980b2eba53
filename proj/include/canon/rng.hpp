#pragma once

// Seeded randomness with platform-independent output. The mt19937_64 bit
// stream is fixed by the standard; bounded draws use rejection sampling so
// results do not depend on the standard library's distribution internals.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace canon {

inline uint64_t derive_seed(uint64_t root, std::string_view label) {
    uint64_t h = 14695981039346656037ULL;
    auto mix = [&](uint8_t byte) {
        h ^= byte;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 8; ++i) mix(uint8_t(root >> (8 * i)));
    for (char c : label) mix(uint8_t(c));
    return h;
}

class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t u64() { return eng_(); }

    // uniform in [0, n)
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % n);
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // m distinct values sampled from pool, returned sorted
    template <typename T>
    std::vector<T> sample_sorted(std::span<const T> pool, size_t m) {
        std::vector<uint32_t> idx(pool.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = uint32_t(i);
        // partial Fisher-Yates
        for (size_t i = 0; i < m; ++i) {
            size_t j = i + size_t(below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<T> out;
        out.reserve(m);
        for (size_t i = 0; i < m; ++i) out.push_back(pool[idx[i]]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace canon
