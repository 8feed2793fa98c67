#pragma once

#include <cstdint>

namespace sselab {

// Counter-based Gaussian stream. Every draw is a pure function of
// (master seed, purpose tag, trajectory index, step, channel), so ensembles
// reproduce bit-for-bit regardless of execution order or thread count.
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t purpose_tag,
                   std::uint64_t trajectory_index);

    // One N(0,1) variate per (step, channel) cell.
    double normal(std::uint64_t step, std::uint64_t channel_count,
                  std::uint64_t channel) const;

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

namespace detail {
// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);
// uniform in (0,1], 53-bit resolution
double to_unit_open(std::uint64_t bits);
} // namespace detail

// Purpose tags keep independent estimators on disjoint streams.
inline constexpr std::uint64_t kStreamLinear = 0x6c696e5353450001ull;
inline constexpr std::uint64_t kStreamNonlinear = 0x6e7373454e4c0002ull;

} // namespace sselab
