#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tfnet {

/// Name recorded in manifests so a reader knows how every random draw was made.
inline constexpr std::string_view kRngDescription =
    "mt19937_64; uniforms from the top 53 bits; normals by Box-Muller; seeds derived with splitmix64";

/// splitmix64 finalizer applied to a ^ (b * golden ratio). Used to derive independent
/// per-sample / per-trial seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Seeded generator with a portable uniform and Gaussian transform, so streams are
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal.
    double normal();
    /// Uniform index in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tfnet
