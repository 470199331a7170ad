#pragma once

#include <cstdint>

namespace pdfs {

/// Counter-based generator: draw n is a pure function of (seed, n), so streams
/// are reproducible across platforms and standard-library implementations.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Standard normal via Box-Muller; consumes two draws per call.
    double normal() noexcept;
    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace pdfs
