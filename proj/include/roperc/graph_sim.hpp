#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "roperc/error.hpp"
#include "roperc/graph.hpp"
#include "roperc/parallel.hpp"
#include "roperc/random.hpp"
#include "roperc/vertex_set.hpp"

namespace roperc {

/// One draw of the wet set {i : S ~> i}.
template <class Urbg>
VertexSet simulate_graph_once(const Graph& graph, const VertexSet& sources, Urbg& rng) {
    return reachable_from(graph, sample_orientation(graph, rng), sources);
}

/// Sample covariance (denominator N-1) of the indicators of i and j across runs.
inline double estimate_covariance(const std::vector<VertexSet>& runs, VertexId i, VertexId j) {
    if (runs.size() < 2) throw Error("covariance estimate needs at least 2 runs");
    double mi = 0.0, mj = 0.0;
    for (const auto& r : runs) {
        mi += r.contains(i) ? 1.0 : 0.0;
        mj += r.contains(j) ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(runs.size());
    mi /= n;
    mj /= n;
    double c = 0.0;
    for (const auto& r : runs) c += ((r.contains(i) ? 1.0 : 0.0) - mi) * ((r.contains(j) ? 1.0 : 0.0) - mj);
    return c / (n - 1.0);
}

struct GraphExperimentOptions {
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct GraphMCSummary {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t vertex_count = 0;
    std::vector<std::uint64_t> wet_counts;  // per vertex
    std::vector<std::uint64_t> co_wet;      // row-major vertex_count^2
    std::map<std::uint64_t, std::uint64_t> size_histogram;

    double frequency(VertexId i) const { return static_cast<double>(wet_counts.at(i)) / static_cast<double>(samples); }

    double covariance(VertexId i, VertexId j) const {
        if (samples < 2) return 0.0;
        const double n = static_cast<double>(samples);
        const double both = static_cast<double>(co_wet.at(i * vertex_count + j));
        const double ci = static_cast<double>(wet_counts[i]), cj = static_cast<double>(wet_counts[j]);
        return (both - ci * cj / n) / (n - 1.0);
    }
};

inline constexpr std::size_t graph_sim_vertex_cap = 4096;

inline GraphMCSummary run_graph_experiment(const Graph& graph, const VertexSet& sources,
                                           const GraphExperimentOptions& options) {
    if (options.samples < 1) throw Error("samples must be >= 1");
    if (sources.size() != graph.vertex_count()) throw Error("source set is over a different vertex count");
    if (sources.empty()) throw Error("empty source");
    if (graph.vertex_count() > graph_sim_vertex_cap) throw Error("graph simulation supports at most 4096 vertices");
    const std::size_t v = graph.vertex_count();

    auto partials = parallel_map(static_cast<std::size_t>(block_count(options.samples)), options.threads,
                                 [&](std::size_t b) {
                                     Engine rng = make_stream(options.seed, b, StreamTag::graph);
                                     GraphMCSummary s;
                                     s.vertex_count = v;
                                     s.wet_counts.assign(v, 0);
                                     s.co_wet.assign(v * v, 0);
                                     const std::uint64_t n = block_samples(options.samples, b);
                                     for (std::uint64_t k = 0; k < n; ++k) {
                                         const auto wet = simulate_graph_once(graph, sources, rng).members();
                                         ++s.samples;
                                         ++s.size_histogram[wet.size()];
                                         for (VertexId a : wet) {
                                             ++s.wet_counts[a];
                                             for (VertexId c : wet) ++s.co_wet[a * v + c];
                                         }
                                     }
                                     return s;
                                 });

    GraphMCSummary total;
    total.seed = options.seed;
    total.vertex_count = v;
    total.wet_counts.assign(v, 0);
    total.co_wet.assign(v * v, 0);
    for (const auto& s : partials) {
        total.samples += s.samples;
        for (std::size_t i = 0; i < v; ++i) total.wet_counts[i] += s.wet_counts[i];
        for (std::size_t i = 0; i < v * v; ++i) total.co_wet[i] += s.co_wet[i];
        for (const auto& [k, c] : s.size_histogram) total.size_histogram[k] += c;
    }
    return total;
}

} // namespace roperc
