#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sft {

/// Deterministic random source. Independent streams are derived from a master
/// seed and a path of integers, so e.g. the sample list for (h, r) does not
/// depend on the order in which lists are drawn.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t mix(std::uint64_t x) noexcept {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
        std::uint64_t s = mix(master);
        for (auto p : path) s = mix(s ^ mix(p + 0x632be59bd9b4e019ULL));
        return s;
    }

    static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
        return Rng(derive(master, path));
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
    }

    /// Uniform real in [lo, hi].
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace sft
