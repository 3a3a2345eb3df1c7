#pragma once

#include <cstdint>

// Counter-based random streams: a stream is keyed by (seed, replication,
// series) and draw i is a pure function of (key, i). Draws can therefore be
// generated in any order, on any thread, with identical results.

namespace curverec::rng {

std::uint64_t mix64(std::uint64_t x) noexcept;

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t series) noexcept;

    // i-th uniform draw in [0, 1).
    double uniform(std::uint64_t i) const noexcept;

    // i-th standard normal draw (Box-Muller over consecutive uniform pairs).
    double normal(std::uint64_t i) const noexcept;

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace curverec::rng
