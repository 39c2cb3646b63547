#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "roperc/error.hpp"
#include "roperc/graph.hpp"
#include "roperc/parallel.hpp"
#include "roperc/random.hpp"
#include "roperc/tree_analytics.hpp"

// Monte Carlo percolation from the leaves of T_n, 64 vertices per machine word.
// Vertices of level k are numbered 0 .. 2^{n-k}-1 left to right; the parent of
// (k, j) is (k+1, j/2). Heap index of (k, j) is 2^{n-k} + j.
namespace roperc::tree {

using Bits = std::vector<std::uint64_t>;

namespace bits {

inline std::size_t words_for(std::size_t nbits) { return (nbits + 63) / 64; }

inline std::uint64_t tail_mask(std::size_t nbits) {
    const std::size_t r = nbits % 64;
    return r == 0 ? ~0ULL : ((1ULL << r) - 1);
}

/// Bits 0,2,4,.. of x packed into the low 32 bits.
inline std::uint64_t compact_even(std::uint64_t x) {
    x &= 0x5555555555555555ULL;
    x = (x | (x >> 1)) & 0x3333333333333333ULL;
    x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0FULL;
    x = (x | (x >> 4)) & 0x00FF00FF00FF00FFULL;
    x = (x | (x >> 8)) & 0x0000FFFF0000FFFFULL;
    x = (x | (x >> 16)) & 0x00000000FFFFFFFFULL;
    return x;
}

/// Low 32 bits of x moved to the even positions.
inline std::uint64_t spread_even(std::uint64_t x) {
    x &= 0x00000000FFFFFFFFULL;
    x = (x | (x << 16)) & 0x0000FFFF0000FFFFULL;
    x = (x | (x << 8)) & 0x00FF00FF00FF00FFULL;
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0FULL;
    x = (x | (x << 2)) & 0x3333333333333333ULL;
    x = (x | (x << 1)) & 0x5555555555555555ULL;
    return x;
}

inline bool test(const Bits& b, std::size_t i) { return ((b[i >> 6] >> (i & 63)) & 1ULL) != 0; }
inline void set(Bits& b, std::size_t i) { b[i >> 6] |= 1ULL << (i & 63); }
inline void clear(Bits& b, std::size_t i) { b[i >> 6] &= ~(1ULL << (i & 63)); }

inline std::size_t popcount(const Bits& b) {
    std::size_t c = 0;
    for (auto w : b) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

} // namespace bits

/// Edge orientations of T_n: up[k] bit j is set when the edge from (k, j) to its
/// parent points toward the root.
struct TreeOrientation {
    unsigned height = 0;
    std::vector<Bits> up;  // levels 0 .. n-1

    explicit TreeOrientation(unsigned n = 0) : height(n), up(n) {
        for (unsigned k = 0; k < n; ++k) up[k].assign(bits::words_for(level_size(k)), 0);
    }

    std::size_t level_size(unsigned k) const { return std::size_t{1} << (height - k); }
    bool toward_root(unsigned k, std::size_t j) const { return bits::test(up[k], j); }

    /// From an orientation of corpus::binary_tree(n, .): edge e joins heap e+2 to its
    /// parent and bit true means toward the root.
    static TreeOrientation from_graph_orientation(unsigned n, const Orientation& o) {
        TreeOrientation t(n);
        const std::size_t edges = (std::size_t{2} << n) - 2;
        if (o.bits.size() != edges) throw Error("orientation does not match T_n");
        for (std::size_t e = 0; e < edges; ++e) {
            const std::size_t heap = e + 2;
            const unsigned depth = static_cast<unsigned>(std::bit_width(heap)) - 1;
            const unsigned k = n - depth;
            if (o.bits[e]) bits::set(t.up[k], heap - (std::size_t{1} << depth));
        }
        return t;
    }
};

/// Exact Bernoulli(p) draws, 64 at a time. For p = m / 2^L (m odd) each output
/// word costs L random words: the lane comparison U < p is built from the
/// least significant binary digit of p upward.
class BernoulliLanes {
public:
    explicit BernoulliLanes(double p) {
        int e = 0;
        const double f = std::frexp(p, &e);
        std::uint64_t m = static_cast<std::uint64_t>(std::ldexp(f, 53));
        int L = 53 - e;
        while (m != 0 && (m & 1ULL) == 0) {
            m >>= 1;
            --L;
        }
        for (int t = 0; t < L; ++t) digits_.push_back(t < 64 && ((m >> t) & 1ULL) != 0);
    }

    template <class Urbg>
    std::uint64_t operator()(Urbg& rng) const {
        std::uint64_t r = 0;
        for (bool d : digits_) {
            const std::uint64_t w = rng();
            r = d ? (r | w) : (r & w);
        }
        return r;
    }

    std::size_t draws_per_word() const { return digits_.size(); }

private:
    std::vector<bool> digits_;
};

/// Geometric skipping is used when min(p, 1-p) is below this; lane draws otherwise.
inline constexpr double sparse_threshold = 1.0 / 16.0;

/// Samples every edge independently toward the root with probability p.
class OrientationSampler {
public:
    explicit OrientationSampler(const TreeParams& params) : params_(params), lanes_(params.bias) {
        params.validate();
        const double p = params.bias;
        rare_ = std::min(p, 1.0 - p);
        sparse_ = rare_ < sparse_threshold;
    }

    template <class Urbg>
    void sample(TreeOrientation& out, Urbg& rng) const {
        const unsigned n = params_.height;
        const double p = params_.bias;
        if (p == 0.0 || p == 1.0 || sparse_) {
            const bool base = p > 0.5;
            fill(out, base);
            if (rare_ > 0.0) scatter(out, rng, !base);
            return;
        }
        for (unsigned k = 0; k < n; ++k) {
            Bits& level = out.up[k];
            for (auto& w : level) w = lanes_(rng);
            level.back() &= bits::tail_mask(out.level_size(k));
        }
    }

private:
    static void fill(TreeOrientation& out, bool value) {
        for (unsigned k = 0; k < out.height; ++k) {
            std::fill(out.up[k].begin(), out.up[k].end(), value ? ~0ULL : 0ULL);
            out.up[k].back() &= bits::tail_mask(out.level_size(k));
        }
    }

    // Positions of the rarer outcome over the edges in level order.
    template <class Urbg>
    void scatter(TreeOrientation& out, Urbg& rng, bool value) const {
        std::geometric_distribution<std::uint64_t> gap(rare_);
        unsigned k = 0;
        std::uint64_t level_start = 0;
        std::uint64_t pos = gap(rng);
        while (k < out.height) {
            while (k < out.height && pos >= level_start + out.level_size(k)) {
                level_start += out.level_size(k);
                ++k;
            }
            if (k >= out.height) break;
            const std::size_t j = static_cast<std::size_t>(pos - level_start);
            if (value)
                bits::set(out.up[k], j);
            else
                bits::clear(out.up[k], j);
            pos += gap(rng) + 1;
        }
    }

    TreeParams params_;
    BernoulliLanes lanes_;
    double rare_ = 0.0;
    bool sparse_ = false;
};

/// Per-vertex outcome: down[k] = Y (wet through level-increasing flow only),
/// wet[k] = X (wet in the bidirectional model). Level 0 is all ones.
struct TreeState {
    unsigned height = 0;
    std::vector<Bits> down;
    std::vector<Bits> wet;

    explicit TreeState(unsigned n = 0) : height(n), down(n + 1), wet(n + 1) {
        for (unsigned k = 0; k <= n; ++k) {
            down[k].assign(bits::words_for(std::size_t{1} << (n - k)), 0);
            wet[k].assign(down[k].size(), 0);
        }
    }

    bool is_wet(unsigned k, std::size_t j) const { return bits::test(wet[k], j); }
    bool is_down_wet(unsigned k, std::size_t j) const { return bits::test(down[k], j); }

    /// Wet vertices as ids of corpus::binary_tree(n, .).
    VertexSet as_vertex_set() const {
        VertexSet s((std::size_t{2} << height) - 1);
        for (unsigned k = 0; k <= height; ++k) {
            const std::size_t m = std::size_t{1} << (height - k);
            for (std::size_t j = 0; j < m; ++j)
                if (is_wet(k, j)) s.insert(static_cast<VertexId>(m + j - 1));
        }
        return s;
    }
};

/// Upward pass: Y_parent = OR over children c of (Y_c AND c -> parent), leaves wet.
/// Downward pass: X_v = Y_v OR (edge parent -> v AND X_parent), X_root = Y_root.
inline void percolate(const TreeOrientation& o, TreeState& s) {
    const unsigned n = o.height;
    std::fill(s.down[0].begin(), s.down[0].end(), ~0ULL);
    s.down[0].back() &= bits::tail_mask(std::size_t{1} << n);
    for (unsigned k = 0; k < n; ++k) {
        const Bits& y = s.down[k];
        const Bits& up = o.up[k];
        Bits& next = s.down[k + 1];
        for (std::size_t w = 0; w < next.size(); ++w) {
            const std::size_t a = 2 * w, b = 2 * w + 1;
            const std::uint64_t za = y[a] & up[a];
            std::uint64_t out = bits::compact_even(za | (za >> 1));
            if (b < y.size()) {
                const std::uint64_t zb = y[b] & up[b];
                out |= bits::compact_even(zb | (zb >> 1)) << 32;
            }
            next[w] = out;
        }
    }
    s.wet[n] = s.down[n];
    for (unsigned k = n; k-- > 0;) {
        const Bits& parent = s.wet[k + 1];
        const Bits& y = s.down[k];
        const Bits& up = o.up[k];
        Bits& x = s.wet[k];
        for (std::size_t w = 0; w < x.size(); ++w) {
            const std::uint64_t half = parent[w >> 1] >> (32 * (w & 1));
            const std::uint64_t e = bits::spread_even(half);
            x[w] = y[w] | (~up[w] & (e | (e << 1)));
        }
        x.back() &= bits::tail_mask(std::size_t{1} << (n - k));
    }
}

struct TreeRun {
    std::uint64_t cluster_size = 0;    // |C_n|, non-leaf X-wet vertices
    std::uint64_t downwards_size = 0;  // |C_n down|, non-leaf Y-wet vertices
    unsigned max_level = 0;            // highest level with a Y-wet vertex, 0 if none
    bool root_wet = false;
};

inline TreeRun summarize(const TreeState& s) {
    TreeRun r;
    for (unsigned k = 1; k <= s.height; ++k) {
        const std::size_t dk = bits::popcount(s.down[k]);
        r.downwards_size += dk;
        r.cluster_size += bits::popcount(s.wet[k]);
        if (dk != 0) r.max_level = k;
    }
    r.root_wet = s.height >= 1 && s.is_down_wet(s.height, 0);
    return r;
}

/// Reusable buffers for repeated runs at fixed parameters.
class TreeSimulator {
public:
    explicit TreeSimulator(const TreeParams& params)
        : params_(params), sampler_(params), orientation_(params.height), state_(params.height) {
        if (params.height < 1) throw Error("tree simulation needs height n >= 1");
    }

    template <class Urbg>
    TreeRun run(Urbg& rng) {
        sampler_.sample(orientation_, rng);
        percolate(orientation_, state_);
        return summarize(state_);
    }

    const TreeState& state() const noexcept { return state_; }
    const TreeOrientation& orientation() const noexcept { return orientation_; }

private:
    TreeParams params_;
    OrientationSampler sampler_;
    TreeOrientation orientation_;
    TreeState state_;
};

template <class Urbg>
TreeRun simulate_tree_once(const TreeParams& params, Urbg& rng) {
    TreeSimulator sim(params);
    return sim.run(rng);
}

// ---------------------------------------------------------------------------

inline constexpr unsigned default_max_height = 26;

struct ExperimentOptions {
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    unsigned max_height = default_max_height;
};

/// Exact integer tallies; merging is associative and commutative.
struct TreeTally {
    std::uint64_t samples = 0;
    std::map<std::uint64_t, std::uint64_t> histogram;  // cluster size -> count
    unsigned __int128 down_sum = 0;
    unsigned __int128 down_sq = 0;
    std::vector<std::uint64_t> max_level_counts;
    std::uint64_t root_wet = 0;

    void add(const TreeRun& r) {
        ++samples;
        ++histogram[r.cluster_size];
        down_sum += r.downwards_size;
        down_sq += static_cast<unsigned __int128>(r.downwards_size) * r.downwards_size;
        if (max_level_counts.size() <= r.max_level) max_level_counts.resize(r.max_level + 1, 0);
        ++max_level_counts[r.max_level];
        root_wet += r.root_wet ? 1 : 0;
    }

    void merge(const TreeTally& o) {
        samples += o.samples;
        for (const auto& [v, c] : o.histogram) histogram[v] += c;
        down_sum += o.down_sum;
        down_sq += o.down_sq;
        if (max_level_counts.size() < o.max_level_counts.size()) max_level_counts.resize(o.max_level_counts.size(), 0);
        for (std::size_t k = 0; k < o.max_level_counts.size(); ++k) max_level_counts[k] += o.max_level_counts[k];
        root_wet += o.root_wet;
    }
};

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

/// Mean and unbiased variance from exact integer sums.
inline MeanVar mean_var_from_sums(std::uint64_t n, unsigned __int128 sum, unsigned __int128 sq) {
    MeanVar mv;
    if (n == 0) return mv;
    mv.mean = static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(n));
    if (n >= 2) {
        // n * sum(x^2) - (sum x)^2 >= 0, exact in 128 bits for the supported sizes.
        const unsigned __int128 num = static_cast<unsigned __int128>(n) * sq - sum * sum;
        mv.variance = static_cast<double>(static_cast<long double>(num) /
                                          (static_cast<long double>(n) * static_cast<long double>(n - 1)));
    }
    return mv;
}

struct MCSummary {
    TreeParams params;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double mean_cluster = 0.0;
    double var_cluster = 0.0;
    double mean_downwards = 0.0;
    double var_downwards = 0.0;
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::map<unsigned, std::uint64_t> max_level_counts;
    std::uint64_t root_wet_count = 0;
    double root_wet_frequency = 0.0;
    std::string generator{generator_name};
};

inline MCSummary summarize(const TreeParams& params, const ExperimentOptions& options, const TreeTally& t) {
    MCSummary s;
    s.params = params;
    s.samples = t.samples;
    s.seed = options.seed;
    s.histogram = t.histogram;
    unsigned __int128 sum = 0, sq = 0;
    for (const auto& [v, c] : t.histogram) {
        sum += static_cast<unsigned __int128>(v) * c;
        sq += static_cast<unsigned __int128>(v) * v * c;
    }
    const MeanVar cl = mean_var_from_sums(t.samples, sum, sq);
    const MeanVar dn = mean_var_from_sums(t.samples, t.down_sum, t.down_sq);
    s.mean_cluster = cl.mean;
    s.var_cluster = cl.variance;
    s.mean_downwards = dn.mean;
    s.var_downwards = dn.variance;
    for (std::size_t k = 0; k < t.max_level_counts.size(); ++k)
        if (t.max_level_counts[k] != 0) s.max_level_counts[static_cast<unsigned>(k)] = t.max_level_counts[k];
    s.root_wet_count = t.root_wet;
    s.root_wet_frequency = t.samples == 0 ? 0.0 : static_cast<double>(t.root_wet) / static_cast<double>(t.samples);
    return s;
}

inline void validate_experiment(const TreeParams& params, const ExperimentOptions& options) {
    params.validate();
    if (options.samples < 1) throw Error("samples must be >= 1");
    if (params.height < 1) throw Error("tree simulation needs height n >= 1");
    if (params.height > options.max_height)
        throw Error("height " + std::to_string(params.height) + " exceeds the cap " +
                    std::to_string(options.max_height) + " (raise --max-height to override)");
}

/// Tallies every sample block by block; block tallies are merged in block order.
inline TreeTally run_tree_tally(const TreeParams& params, const ExperimentOptions& options) {
    validate_experiment(params, options);
    const std::uint64_t blocks = block_count(options.samples);
    auto tallies = parallel_map(static_cast<std::size_t>(blocks), options.threads, [&](std::size_t b) {
        Engine rng = make_stream(options.seed, b, StreamTag::tree);
        TreeSimulator sim(params);
        TreeTally t;
        const std::uint64_t n = block_samples(options.samples, b);
        for (std::uint64_t i = 0; i < n; ++i) t.add(sim.run(rng));
        return t;
    });
    TreeTally total;
    for (const auto& t : tallies) total.merge(t);
    return total;
}

/// Independent runs aggregated into a summary that depends only on
/// (params, samples, seed), never on options.threads.
inline MCSummary run_tree_experiment(const TreeParams& params, const ExperimentOptions& options) {
    return summarize(params, options, run_tree_tally(params, options));
}

} // namespace roperc::tree
