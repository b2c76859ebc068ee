#pragma once

#include <cstdint>

namespace mqj {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Seed of stream `index` under `master`: mix64(master + (index + 1) * golden).
/// Ensemble member i uses derive_seed(master_seed, i).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * kGolden);
}

/*!
 * Counter-based uniform stream.
 *
 * Draw k of the stream keyed by `key` is a pure function of (key, k), so
 * records do not depend on scheduling or worker count. Values lie in the
 * open interval (0, 1) with 53 bits of resolution.
 */
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(mix64(key)) {}

    static constexpr double to_unit(std::uint64_t bits) {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    constexpr double at(std::uint64_t counter) const {
        return to_unit(mix64(key_ + (counter + 1) * kGolden));
    }

    constexpr double next() { return at(counter_++); }
    constexpr std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace mqj
