#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "roperc/dyadic.hpp"
#include "roperc/error.hpp"
#include "roperc/graph.hpp"
#include "roperc/parallel.hpp"
#include "roperc/vertex_set.hpp"

namespace roperc {

enum class Arithmetic { automatic, exact, floating };

struct EnumerationOptions {
    std::size_t edge_cap = 24;
    unsigned threads = 1;
};

/// Largest edge count and bias denominator exponent for which exact mode is chosen
/// automatically.
inline constexpr std::size_t exact_edge_limit = 16;
inline constexpr unsigned exact_bias_exponent = 16;

/// Exact probability mass over wetness vectors. Bit i of a wetness mask is the
/// indicator of {S ~> i}. Entries are sorted by mask and have positive mass.
template <class Real>
class JointDistribution {
public:
    struct Entry {
        std::uint64_t wet;
        Real mass;
    };

    JointDistribution(std::size_t vertex_count, VertexSet sources, std::vector<Entry> entries)
        : vertex_count_(vertex_count), sources_(std::move(sources)), entries_(std::move(entries)) {}

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    const VertexSet& sources() const noexcept { return sources_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    Real total() const {
        Real t{0};
        for (const auto& e : entries_) t += e.mass;
        return t;
    }

    Real mass_of(std::uint64_t wet) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), wet,
                                   [](const Entry& e, std::uint64_t w) { return e.wet < w; });
        return (it != entries_.end() && it->wet == wet) ? it->mass : Real{0};
    }

    /// P(X in A) for a predicate on wetness masks.
    template <class Pred>
    Real probability(Pred&& pred) const {
        Real t{0};
        for (const auto& e : entries_)
            if (pred(e.wet)) t += e.mass;
        return t;
    }

private:
    std::size_t vertex_count_;
    VertexSet sources_;
    std::vector<Entry> entries_;
};

using ExactJoint = JointDistribution<Dyadic>;
using FloatJoint = JointDistribution<double>;
using AnyJoint = std::variant<FloatJoint, ExactJoint>;

inline bool exact_eligible(const Graph& graph) {
    if (graph.edge_count() > exact_edge_limit) return false;
    return std::all_of(graph.edges().begin(), graph.edges().end(),
                       [](const Edge& e) { return Dyadic::from_double(e.bias, exact_bias_exponent).has_value(); });
}

namespace detail {

inline void validate_enumeration(const Graph& graph, const VertexSet& sources, const EnumerationOptions& options) {
    if (graph.edge_count() > options.edge_cap)
        throw Error("exact enumeration capped at " + std::to_string(options.edge_cap) + " edges (graph has " +
                    std::to_string(graph.edge_count()) + ")");
    if (graph.edge_count() >= 63) throw Error("exact enumeration needs fewer than 63 edges");
    if (graph.vertex_count() > 64) throw Error("exact enumeration supports at most 64 vertices");
    if (sources.size() != graph.vertex_count()) throw Error("source set is over a different vertex count");
    if (sources.empty()) throw Error("empty source");
}

// Orientation weight = low-half product * high-half product, each half tabulated.
// Exact mode keeps integer numerators over the common denominator 2^(16 |E|).
template <class Real>
struct WeightTables {
    using Acc = std::conditional_t<std::is_same_v<Real, Dyadic>, Dyadic::Integer, double>;

    std::size_t low_bits = 0;
    std::vector<Acc> low, high;

    explicit WeightTables(const Graph& graph) {
        const std::size_t m = graph.edge_count();
        low_bits = m / 2;
        low = table(graph, 0, low_bits);
        high = table(graph, low_bits, m);
    }

    Acc weight(std::uint64_t o) const {
        return low[o & ((1ULL << low_bits) - 1)] * high[o >> low_bits];
    }

private:
    static Acc factor(const Edge& e, bool forward) {
        if constexpr (std::is_same_v<Real, Dyadic>) {
            const auto d = Dyadic::from_double(e.bias, exact_bias_exponent);
            if (!d) throw Error("exact mode needs dyadic biases with denominator <= 2^16");
            const Dyadic::Integer num = d->numerator() << (exact_bias_exponent - d->exponent());
            const Dyadic::Integer one = Dyadic::Integer(1) << exact_bias_exponent;
            return forward ? num : one - num;
        } else {
            return forward ? e.bias : 1.0 - e.bias;
        }
    }

    static std::vector<Acc> table(const Graph& graph, std::size_t first, std::size_t last) {
        const std::size_t bits = last - first;
        std::vector<Acc> t(std::size_t{1} << bits);
        for (std::uint64_t o = 0; o < t.size(); ++o) {
            Acc w{1};
            for (std::size_t k = 0; k < bits; ++k) w *= factor(graph.edges()[first + k], ((o >> k) & 1ULL) != 0);
            t[o] = w;
        }
        return t;
    }
};

inline constexpr std::uint64_t enumeration_chunk = 4096;

} // namespace detail

/// Exact joint law of ({S ~> i})_i over all 2^|E| orientations, in edge-index-major
/// binary counting order. Orientations are split into fixed chunks that are summed
/// independently and merged in chunk order, so the result does not depend on
/// options.threads.
template <class Real>
JointDistribution<Real> enumerate_joint(const Graph& graph, const VertexSet& sources,
                                        const EnumerationOptions& options = {}) {
    detail::validate_enumeration(graph, sources, options);
    using Tables = detail::WeightTables<Real>;
    using Acc = typename Tables::Acc;
    const Tables tables(graph);
    const std::uint64_t source_mask = sources.to_mask();
    const std::uint64_t total = 1ULL << graph.edge_count();
    const std::uint64_t chunk = std::min(total, detail::enumeration_chunk);
    const std::uint64_t chunks = total / chunk;

    using Partial = std::vector<std::pair<std::uint64_t, Acc>>;
    auto run_chunk = [&](std::size_t c) {
        std::unordered_map<std::uint64_t, Acc> acc;
        const std::uint64_t begin = c * chunk;
        for (std::uint64_t o = begin; o < begin + chunk; ++o) {
            Acc w = tables.weight(o);
            if (w == Acc{0}) continue;
            acc[detail::reach_mask(graph, o, source_mask)] += w;
        }
        Partial out(acc.begin(), acc.end());
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    };

    std::map<std::uint64_t, Acc> merged;
    const std::size_t batch = std::max<std::size_t>(1, 4 * std::size_t{std::max(1u, options.threads)});
    for (std::uint64_t first = 0; first < chunks; first += batch) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, chunks - first));
        auto partials = parallel_map(count, options.threads, [&](std::size_t i) { return run_chunk(first + i); });
        for (const auto& part : partials)
            for (const auto& [wet, w] : part) merged[wet] += w;
    }

    std::vector<typename JointDistribution<Real>::Entry> entries;
    entries.reserve(merged.size());
    for (auto& [wet, w] : merged) {
        if constexpr (std::is_same_v<Real, Dyadic>) {
            entries.push_back({wet, Dyadic(w, static_cast<unsigned>(exact_bias_exponent * graph.edge_count()))});
        } else {
            entries.push_back({wet, w});
        }
    }
    return JointDistribution<Real>(graph.vertex_count(), sources, std::move(entries));
}

/// Exact mode when every bias is dyadic with denominator <= 2^16 and |E| <= 16
/// (or when forced), double precision otherwise.
inline AnyJoint enumerate_joint_auto(const Graph& graph, const VertexSet& sources,
                                     Arithmetic mode = Arithmetic::automatic, const EnumerationOptions& options = {}) {
    const bool exact = mode == Arithmetic::exact || (mode == Arithmetic::automatic && exact_eligible(graph));
    if (exact) return enumerate_joint<Dyadic>(graph, sources, options);
    return enumerate_joint<double>(graph, sources, options);
}

template <class Real>
Real marginal(const JointDistribution<Real>& dist, VertexId i) {
    if (i >= dist.vertex_count()) throw Error("vertex " + std::to_string(i) + " out of range");
    const std::uint64_t bit = 1ULL << i;
    return dist.probability([bit](std::uint64_t w) { return (w & bit) != 0; });
}

template <class Real>
Real pair_probability(const JointDistribution<Real>& dist, VertexId i, VertexId j) {
    if (i >= dist.vertex_count() || j >= dist.vertex_count()) throw Error("vertex out of range");
    const std::uint64_t both = (1ULL << i) | (1ULL << j);
    return dist.probability([both](std::uint64_t w) { return (w & both) == both; });
}

template <class Real>
Real pair_covariance(const JointDistribution<Real>& dist, VertexId i, VertexId j) {
    return pair_probability(dist, i, j) - marginal(dist, i) * marginal(dist, j);
}

/// Law of the sub-vector (X_w)_{w in window}; point bit j is coordinate window[j].
template <class Real>
std::vector<Real> project(const JointDistribution<Real>& dist, const std::vector<VertexId>& window) {
    if (window.size() > 20) throw Error("projection window too large");
    std::vector<Real> pmf(std::size_t{1} << window.size(), Real{0});
    for (const auto& e : dist.entries()) {
        std::uint32_t point = 0;
        for (std::size_t j = 0; j < window.size(); ++j)
            if ((e.wet >> window[j]) & 1ULL) point |= 1u << j;
        pmf[point] += e.mass;
    }
    return pmf;
}

/// P(i ~> T) for every vertex i, by enumerating orientations and searching forward
/// from each vertex separately.
template <class Real>
std::vector<Real> probability_reaches_targets(const Graph& graph, const VertexSet& targets,
                                              const EnumerationOptions& options = {}) {
    detail::validate_enumeration(graph, targets, options);
    const detail::WeightTables<Real> tables(graph);
    const std::uint64_t target_mask = targets.to_mask();
    using Acc = typename detail::WeightTables<Real>::Acc;
    std::vector<Acc> acc(graph.vertex_count(), Acc{0});
    const std::uint64_t total = 1ULL << graph.edge_count();
    for (std::uint64_t o = 0; o < total; ++o) {
        const Acc w = tables.weight(o);
        for (VertexId i = 0; i < graph.vertex_count(); ++i)
            if ((detail::reach_mask(graph, o, 1ULL << i) & target_mask) != 0) acc[i] += w;
    }
    std::vector<Real> out;
    for (auto& a : acc) {
        if constexpr (std::is_same_v<Real, Dyadic>) {
            out.emplace_back(a, static_cast<unsigned>(exact_bias_exponent * graph.edge_count()));
        } else {
            out.push_back(a);
        }
    }
    return out;
}

} // namespace roperc
