#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cfrca {

// splitmix64 finalizer (Steele, Lea, Flood 2014):
//   z += 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
std::uint64_t splitmix64(std::uint64_t z) noexcept;

// Derives a child seed from (seed, index). Used for per-instance and
// per-stream seeding so that results never depend on call order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Portable random source. The engine is std::mt19937_64 (fully specified
// by the standard); every variate transform is implemented here so the
// streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform integer on [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n);
    double normal();
    double exponential();
    // Inversion for small means, PTRS transformed rejection (Hormann 1993)
    // for mean >= 10.
    std::int64_t poisson(double mean);

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cfrca
