#include "curverec/rng.hpp"

#include <cmath>
#include <numbers>

namespace curverec::rng {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += kGamma;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t series) noexcept {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ replication);
    key_ = mix64(k ^ series);
}

double Stream::uniform(std::uint64_t i) const noexcept {
    return static_cast<double>(mix64(key_ + i * kGamma) >> 11) * kInv53;
}

double Stream::normal(std::uint64_t i) const noexcept {
    const std::uint64_t pair = i >> 1;
    // u1 in (0, 1] so the log is finite
    const double u1 =
        (static_cast<double>(mix64(key_ + (2 * pair) * kGamma) >> 11) + 1.0) * kInv53;
    const double u2 = static_cast<double>(mix64(key_ + (2 * pair + 1) * kGamma) >> 11) * kInv53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (i & 1) == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

}  // namespace curverec::rng
