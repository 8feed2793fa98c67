#include "sselab/rng.hpp"

#include <cmath>
#include <numbers>

namespace sselab {

namespace detail {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double to_unit_open(std::uint64_t bits) {
    // (0,1]: never returns 0, so log() below is safe
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace detail

GaussianStream::GaussianStream(std::uint64_t master_seed, std::uint64_t purpose_tag,
                               std::uint64_t trajectory_index) {
    std::uint64_t k = detail::mix64(master_seed ^ purpose_tag);
    key_ = detail::mix64(k ^ detail::mix64(trajectory_index ^ 0xa5a5a5a5a5a5a5a5ull));
}

double GaussianStream::normal(std::uint64_t step, std::uint64_t channel_count,
                              std::uint64_t channel) const {
    const std::uint64_t cell = step * channel_count + channel;
    const std::uint64_t b0 = detail::mix64(key_ ^ detail::mix64(2 * cell));
    const std::uint64_t b1 = detail::mix64(key_ ^ detail::mix64(2 * cell + 1));
    const double u1 = detail::to_unit_open(b0);
    const double u2 = detail::to_unit_open(b1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace sselab
