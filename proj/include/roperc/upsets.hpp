#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roperc/error.hpp"

namespace roperc {

/// Every up-set of the cube {0,1}^ground_size. A point x is an integer whose bit j
/// is coordinate j; an up-set is a 2^ground_size-bit indicator (bit x set iff x in U).
struct UpSetFamily {
    unsigned ground_size = 0;
    std::vector<std::uint32_t> upsets;

    std::size_t point_count() const noexcept { return std::size_t{1} << ground_size; }
    std::uint32_t full() const noexcept {
        return ground_size == 5 ? 0xFFFFFFFFu : ((1u << point_count()) - 1u);
    }
};

inline constexpr unsigned max_upset_ground_size = 5;

inline bool point_leq(std::uint32_t x, std::uint32_t y) noexcept { return (x & ~y) == 0; }

inline bool is_upset(std::uint32_t set, unsigned ground_size) {
    const std::uint32_t points = 1u << ground_size;
    for (std::uint32_t x = 0; x < points; ++x) {
        if (((set >> x) & 1u) == 0) continue;
        for (unsigned j = 0; j < ground_size; ++j)
            if (((set >> (x | (1u << j))) & 1u) == 0) return false;
    }
    return true;
}

/// Splitting on the last coordinate, U = A x {0} + B x {1} is an up-set iff A and B
/// are up-sets of the smaller cube with A subset of B.
inline UpSetFamily enumerate_upsets(unsigned ground_size) {
    if (ground_size > max_upset_ground_size) throw Error("up-set enumeration capped at 5");
    std::vector<std::uint32_t> level{0u, 1u};  // ground size 0: empty set, {()}
    for (unsigned k = 1; k <= ground_size; ++k) {
        const unsigned half = 1u << (k - 1);  // points in the smaller cube
        std::vector<std::uint32_t> next;
        for (std::uint32_t a : level)
            for (std::uint32_t b : level)
                if ((a & ~b) == 0) next.push_back(a | (b << half));
        level = std::move(next);
    }
    return {ground_size, std::move(level)};
}

} // namespace roperc
