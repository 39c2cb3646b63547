#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roperc/error.hpp"
#include "roperc/vertex_set.hpp"

namespace roperc {

/// Undirected edge {u, v}; `bias` is the probability that it is oriented u -> v.
struct Edge {
    VertexId u = 0;
    VertexId v = 0;
    double bias = 0.5;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite simple graph with an independent orientation bias on every edge.
/// Immutable once built; edge order is load order and is also the RNG draw order.
class Graph {
public:
    struct Incidence {
        std::uint32_t edge;
        VertexId other;
        bool is_tail_when_set;  // this vertex is `u`, so bit=true points away from it
    };

    Graph() = default;

    Graph(std::size_t vertex_count, std::vector<Edge> edges)
        : vertex_count_(vertex_count), edges_(std::move(edges)), incidence_(vertex_count) {
        if (vertex_count == 0) throw Error("graph needs at least one vertex");
        std::set<std::pair<VertexId, VertexId>> seen;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const Edge& e = edges_[i];
            if (e.u >= vertex_count || e.v >= vertex_count)
                throw Error("edge " + std::to_string(i) + " has an out-of-range endpoint");
            if (e.u == e.v) throw Error("edge " + std::to_string(i) + " is a self-loop");
            if (!(e.bias >= 0.0 && e.bias <= 1.0))
                throw Error("edge " + std::to_string(i) + " has bias outside [0,1]");
            const std::pair<VertexId, VertexId> key{std::min(e.u, e.v), std::max(e.u, e.v)};
            if (!seen.insert(key).second)
                throw Error("duplicate edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
            incidence_[e.u].push_back({static_cast<std::uint32_t>(i), e.v, true});
            incidence_[e.v].push_back({static_cast<std::uint32_t>(i), e.u, false});
        }
    }

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Incidence>& incident(VertexId v) const { return incidence_.at(v); }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.vertex_count_ == b.vertex_count_ && a.edges_ == b.edges_;
    }

private:
    std::size_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
};

/// One boolean per edge, in edge order; true means u -> v.
struct Orientation {
    std::vector<bool> bits;

    static Orientation from_mask(std::size_t edge_count, std::uint64_t mask) {
        Orientation o;
        o.bits.resize(edge_count);
        for (std::size_t e = 0; e < edge_count; ++e) o.bits[e] = ((mask >> e) & 1ULL) != 0;
        return o;
    }

    friend bool operator==(const Orientation&, const Orientation&) = default;
};

/// Draws one Bernoulli(bias) per edge, in edge order.
template <class Urbg>
Orientation sample_orientation(const Graph& graph, Urbg& rng) {
    Orientation o;
    o.bits.reserve(graph.edge_count());
    for (const Edge& e : graph.edges()) {
        std::bernoulli_distribution coin(e.bias);
        o.bits.push_back(coin(rng));
    }
    return o;
}

/// Vertices reachable along oriented paths from `sources` (multi-source BFS).
inline VertexSet reachable_from(const Graph& graph, const Orientation& orientation, const VertexSet& sources) {
    if (orientation.bits.size() != graph.edge_count())
        throw Error("orientation length does not match edge count");
    if (sources.size() != graph.vertex_count())
        throw Error("source set is over a different vertex count");
    if (sources.empty()) throw Error("empty source");

    VertexSet wet = sources;
    std::vector<VertexId> queue = sources.members();
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId x = queue[head];
        for (const auto& inc : graph.incident(x)) {
            if (orientation.bits[inc.edge] == inc.is_tail_when_set && !wet.contains(inc.other)) {
                wet.insert(inc.other);
                queue.push_back(inc.other);
            }
        }
    }
    return wet;
}

namespace detail {

// Same closure as reachable_from, over <= 64 vertices and <= 64 edges packed in
// machine words. Used by the enumeration loops.
inline std::uint64_t reach_mask(const Graph& graph, std::uint64_t orientation, std::uint64_t sources) {
    std::uint64_t wet = sources;
    std::uint64_t frontier = sources;
    while (frontier != 0) {
        const auto x = static_cast<VertexId>(std::countr_zero(frontier));
        frontier &= frontier - 1;
        for (const auto& inc : graph.incident(x)) {
            const bool forward = ((orientation >> inc.edge) & 1ULL) != 0;
            const std::uint64_t bit = 1ULL << inc.other;
            if (forward == inc.is_tail_when_set && (wet & bit) == 0) {
                wet |= bit;
                frontier |= bit;
            }
        }
    }
    return wet;
}

} // namespace detail

/// Same vertices and edges, every bias replaced by 1 - bias.
inline Graph reverse_graph(const Graph& graph) {
    std::vector<Edge> edges = graph.edges();
    for (Edge& e : edges) e.bias = 1.0 - e.bias;
    return Graph(graph.vertex_count(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Text format:
//   vertices N
//   edge u v [p]
// Blank lines and '#' comments are ignored.

inline Graph parse_graph(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::size_t vertex_count = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    std::set<std::pair<VertexId, VertexId>> seen;

    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream line(raw);
        std::string keyword;
        if (!(line >> keyword)) continue;

        if (keyword == "vertices") {
            if (have_header) throw ParseError(line_no, "repeated 'vertices' line");
            long long n = 0;
            if (!(line >> n) || n <= 0) throw ParseError(line_no, "expected a positive vertex count");
            vertex_count = static_cast<std::size_t>(n);
            have_header = true;
        } else if (keyword == "edge") {
            if (!have_header) throw ParseError(line_no, "'edge' before 'vertices'");
            long long u = -1, v = -1;
            if (!(line >> u >> v)) throw ParseError(line_no, "expected 'edge u v [p]'");
            double p = 0.5;
            std::string tok;
            if (line >> tok) {
                std::size_t used = 0;
                try {
                    p = std::stod(tok, &used);
                } catch (const std::exception&) {
                    throw ParseError(line_no, "bias '" + tok + "' is not a number");
                }
                if (used != tok.size()) throw ParseError(line_no, "bias '" + tok + "' is not a number");
            }
            if (line >> tok) throw ParseError(line_no, "trailing token '" + tok + "'");
            if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= vertex_count ||
                static_cast<std::size_t>(v) >= vertex_count)
                throw ParseError(line_no, "vertex id out of range [0," + std::to_string(vertex_count) + ")");
            if (u == v) throw ParseError(line_no, "self-loop on vertex " + std::to_string(u));
            if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line_no, "bias must lie in [0,1]");
            const std::pair<VertexId, VertexId> key{static_cast<VertexId>(std::min(u, v)),
                                                    static_cast<VertexId>(std::max(u, v))};
            if (!seen.insert(key).second)
                throw ParseError(line_no, "duplicate edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
            edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), p});
        } else {
            throw ParseError(line_no, "unknown keyword '" + keyword + "'");
        }
    }
    if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'vertices' line");
    return Graph(vertex_count, std::move(edges));
}

inline Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

inline Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file '" + path + "'");
    return parse_graph(in);
}

inline void write_graph(std::ostream& out, const Graph& graph) {
    out << "vertices " << graph.vertex_count() << '\n';
    const auto old = out.precision(17);
    for (const Edge& e : graph.edges()) out << "edge " << e.u << ' ' << e.v << ' ' << e.bias << '\n';
    out.precision(old);
}

} // namespace roperc
