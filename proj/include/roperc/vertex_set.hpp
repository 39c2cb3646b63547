#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "roperc/error.hpp"

namespace roperc {

using VertexId = std::uint32_t;

/// Bit-vector over the vertex ids 0..size()-1.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t vertex_count)
        : size_(vertex_count), words_((vertex_count + 63) / 64, 0) {}

    VertexSet(std::size_t vertex_count, std::initializer_list<VertexId> members)
        : VertexSet(vertex_count) {
        for (VertexId v : members) insert(v);
    }

    static VertexSet from_members(std::size_t vertex_count, const std::vector<VertexId>& members) {
        VertexSet s(vertex_count);
        for (VertexId v : members) s.insert(v);
        return s;
    }

    /// Only valid for vertex_count <= 64.
    static VertexSet from_mask(std::size_t vertex_count, std::uint64_t mask) {
        if (vertex_count > 64) throw Error("bitmask form requires at most 64 vertices");
        VertexSet s(vertex_count);
        if (vertex_count > 0) {
            const std::uint64_t keep = vertex_count == 64 ? ~0ULL : ((1ULL << vertex_count) - 1);
            s.words_[0] = mask & keep;
        }
        return s;
    }

    std::size_t size() const noexcept { return size_; }

    bool contains(VertexId v) const noexcept {
        return v < size_ && ((words_[v >> 6] >> (v & 63)) & 1ULL) != 0;
    }

    void insert(VertexId v) {
        check(v);
        words_[v >> 6] |= 1ULL << (v & 63);
    }

    void erase(VertexId v) {
        check(v);
        words_[v >> 6] &= ~(1ULL << (v & 63));
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const noexcept {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    bool is_subset_of(const VertexSet& other) const noexcept {
        if (other.size_ != size_) return false;
        for (std::size_t i = 0; i < words_.size(); ++i)
            if ((words_[i] & ~other.words_[i]) != 0) return false;
        return true;
    }

    std::vector<VertexId> members() const {
        std::vector<VertexId> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w != 0) {
                out.push_back(static_cast<VertexId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
                w &= w - 1;
            }
        }
        return out;
    }

    std::uint64_t to_mask() const {
        if (size_ > 64) throw Error("bitmask form requires at most 64 vertices");
        return words_.empty() ? 0 : words_[0];
    }

    VertexSet& operator|=(const VertexSet& other) {
        same_universe(other);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    void check(VertexId v) const {
        if (v >= size_)
            throw Error("vertex " + std::to_string(v) + " out of range (vertex_count " +
                        std::to_string(size_) + ")");
    }
    void same_universe(const VertexSet& other) const {
        if (other.size_ != size_) throw Error("vertex sets over different vertex counts");
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace roperc
