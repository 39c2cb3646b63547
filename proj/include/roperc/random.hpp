#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace roperc {

using Engine = std::mt19937_64;

/// Samples are processed in fixed blocks; block b always draws from stream (seed, b),
/// whatever the number of worker threads.
inline constexpr std::uint64_t samples_per_block = 1024;

enum class StreamTag : std::uint32_t { tree = 1, graph = 2, poisson_synthetic = 3 };

inline constexpr std::string_view generator_name = "mt19937_64 via seed_seq(seed, block, stream), 1024 samples/block";

inline Engine make_stream(std::uint64_t seed, std::uint64_t block, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                      static_cast<std::uint32_t>(tag)};
    return Engine(seq);
}

inline std::uint64_t block_count(std::uint64_t samples) { return (samples + samples_per_block - 1) / samples_per_block; }

inline std::uint64_t block_samples(std::uint64_t samples, std::uint64_t block) {
    const std::uint64_t begin = block * samples_per_block;
    return samples - begin < samples_per_block ? samples - begin : samples_per_block;
}

} // namespace roperc
