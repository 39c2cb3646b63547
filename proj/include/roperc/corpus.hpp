#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "roperc/graph.hpp"

// Small named graphs with a uniform orientation bias, used for validation runs.
namespace roperc::corpus {

inline Graph path(std::size_t vertices, double bias) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i + 1 < vertices; ++i) edges.push_back({i, i + 1, bias});
    return Graph(vertices, std::move(edges));
}

inline Graph star(std::size_t leaves, double bias) {
    std::vector<Edge> edges;
    for (VertexId i = 1; i <= leaves; ++i) edges.push_back({0, i, bias});
    return Graph(leaves + 1, std::move(edges));
}

inline Graph cycle(std::size_t vertices, double bias) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i < vertices; ++i)
        edges.push_back({i, static_cast<VertexId>((i + 1) % vertices), bias});
    return Graph(vertices, std::move(edges));
}

inline Graph complete(std::size_t vertices, double bias) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i < vertices; ++i)
        for (VertexId j = i + 1; j < vertices; ++j) edges.push_back({i, j, bias});
    return Graph(vertices, std::move(edges));
}

/// Vertices s=0, a=1, b=2; edges sa, sb, ab.
inline Graph triangle(double bias) {
    return Graph(3, {{0, 1, bias}, {0, 2, bias}, {1, 2, bias}});
}

/// Complete binary tree of height n. Vertex id = heap index - 1 (root 0, children of
/// heap i at 2i and 2i+1); leaves are ids 2^n-1 .. 2^(n+1)-2. Every edge is stored
/// child -> parent, so its bias is the probability of pointing toward the root.
inline Graph binary_tree(unsigned height, double toward_root) {
    const std::size_t vertices = (std::size_t{2} << height) - 1;
    std::vector<Edge> edges;
    for (std::size_t heap = 2; heap <= vertices; ++heap)
        edges.push_back({static_cast<VertexId>(heap - 1), static_cast<VertexId>(heap / 2 - 1), toward_root});
    return Graph(vertices, std::move(edges));
}

inline VertexSet binary_tree_leaves(unsigned height) {
    const std::size_t vertices = (std::size_t{2} << height) - 1;
    VertexSet leaves(vertices);
    for (std::size_t id = (std::size_t{1} << height) - 1; id < vertices; ++id) leaves.insert(static_cast<VertexId>(id));
    return leaves;
}

/// Level of a binary_tree vertex id (leaves are level 0).
inline unsigned binary_tree_level(unsigned height, VertexId id) {
    const std::size_t heap = static_cast<std::size_t>(id) + 1;
    unsigned depth = 0;
    while ((heap >> (depth + 1)) != 0) ++depth;
    return height - depth;
}

struct NamedGraph {
    std::string name;
    Graph graph;
};

/// P3, P4, K1,3, triangle, C4, K4, T_2.
inline std::vector<NamedGraph> validation_corpus(double bias) {
    return {
        {"P3", path(3, bias)},     {"P4", path(4, bias)},         {"K1,3", star(3, bias)},
        {"triangle", triangle(bias)}, {"C4", cycle(4, bias)},     {"K4", complete(4, bias)},
        {"T2", binary_tree(2, bias)},
    };
}

} // namespace roperc::corpus
