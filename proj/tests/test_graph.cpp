#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roperc/corpus.hpp"
#include "roperc/graph.hpp"
#include "roperc/random.hpp"

using namespace roperc;

TEST(SampleOrientation, DeterministicBiases) {
    Engine rng(7);
    const Graph one(2, {{0, 1, 1.0}});
    const Graph zero(2, {{0, 1, 0.0}});
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_orientation(one, rng).bits, std::vector<bool>{true});
        EXPECT_EQ(sample_orientation(zero, rng).bits, std::vector<bool>{false});
    }
}

TEST(SampleOrientation, UnbiasedTriangleFrequencies) {
    const Graph g = corpus::triangle(0.5);
    Engine rng = make_stream(11, 0, StreamTag::graph);
    const int n = 100000;
    std::vector<int> ones(3, 0);
    for (int i = 0; i < n; ++i) {
        const auto o = sample_orientation(g, rng);
        for (int e = 0; e < 3; ++e) ones[e] += o.bits[e] ? 1 : 0;
    }
    const double tol = 3.0 * std::sqrt(0.25 / n);
    for (int e = 0; e < 3; ++e) EXPECT_NEAR(ones[e] / double(n), 0.5, tol) << "edge " << e;
}

TEST(SampleOrientation, SameSeedSameDraws) {
    const Graph g = corpus::complete(5, 0.3);
    Engine a = make_stream(42, 3, StreamTag::graph), b = make_stream(42, 3, StreamTag::graph);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_orientation(g, a), sample_orientation(g, b));
}

TEST(ReachableFrom, PathExamples) {
    const Graph g(2, {{0, 1, 0.5}});
    const VertexSet s(2, {0});
    EXPECT_EQ(reachable_from(g, Orientation{{true}}, s), VertexSet(2, {0, 1}));
    EXPECT_EQ(reachable_from(g, Orientation{{false}}, s), VertexSet(2, {0}));
}

TEST(ReachableFrom, TriangleHandTrace) {
    // edges sa, sb, ab oriented s->a, b->s, a->b
    const Graph g = corpus::triangle(0.5);
    const Orientation o{{true, false, true}};
    EXPECT_EQ(reachable_from(g, o, VertexSet(3, {0})), VertexSet(3, {0, 1, 2}));
}

TEST(ReachableFrom, EmptySourceRejected) {
    const Graph g = corpus::triangle(0.5);
    try {
        reachable_from(g, Orientation{{true, true, true}}, VertexSet(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "empty source");
    }
}

TEST(ReachableFrom, MatchesClosureOracleAndInvariants) {
    for (const auto& [name, g] : corpus::validation_corpus(0.5)) {
        const std::uint64_t all = (1ULL << g.vertex_count()) - 1;
        for (std::uint64_t o = 0; o < (1ULL << g.edge_count()); ++o) {
            const auto orient = Orientation::from_mask(g.edge_count(), o);
            for (std::uint64_t s = 1; s <= all; ++s) {
                const auto src = VertexSet::from_mask(g.vertex_count(), s);
                const auto wet = reachable_from(g, orient, src);
                ASSERT_EQ(wet.to_mask(), oracle::closure_reach(g, o, s)) << name;
                ASSERT_EQ(detail::reach_mask(g, o, s), wet.to_mask()) << name;
                ASSERT_TRUE(src.is_subset_of(wet));
                // closed under one oriented step
                for (std::size_t e = 0; e < g.edge_count(); ++e) {
                    const auto& ed = g.edges()[e];
                    const auto from = orient.bits[e] ? ed.u : ed.v;
                    const auto to = orient.bits[e] ? ed.v : ed.u;
                    if (wet.contains(from)) ASSERT_TRUE(wet.contains(to));
                }
                // monotone in the sources
                for (std::uint64_t t = s; t <= all; t = (t + 1) | s)
                    ASSERT_TRUE(wet.is_subset_of(reachable_from(g, orient, VertexSet::from_mask(g.vertex_count(), t))));
            }
        }
    }
}

TEST(ReachableFrom, FlippingAwayFromWetSetNeverEnlarges) {
    // A boundary edge re-pointed into its wet endpoint cannot enlarge the cluster.
    for (const auto& [name, g] : corpus::validation_corpus(0.5)) {
        const VertexSet src(g.vertex_count(), {0});
        for (std::uint64_t o = 0; o < (1ULL << g.edge_count()); ++o) {
            const auto base = reachable_from(g, Orientation::from_mask(g.edge_count(), o), src);
            for (std::size_t e = 0; e < g.edge_count(); ++e) {
                const auto& ed = g.edges()[e];
                bool into_u_wet = base.contains(ed.u) && !base.contains(ed.v);
                bool into_v_wet = base.contains(ed.v) && !base.contains(ed.u);
                if (!into_u_wet && !into_v_wet) continue;
                const std::uint64_t flipped = into_u_wet ? (o & ~(1ULL << e)) : (o | (1ULL << e));
                const auto after = reachable_from(g, Orientation::from_mask(g.edge_count(), flipped), src);
                ASSERT_TRUE(after.is_subset_of(base)) << name;
            }
        }
    }
}

TEST(ReverseGraph, ComplementsBiasAndIsInvolution) {
    const Graph g(2, {{0, 1, 0.3}});
    EXPECT_DOUBLE_EQ(reverse_graph(g).edges()[0].bias, 0.7);
    for (const auto& [name, h] : corpus::validation_corpus(0.375)) EXPECT_EQ(reverse_graph(reverse_graph(h)), h) << name;
}

TEST(GraphFormat, ParsesWithDefaultBias) {
    const Graph g = parse_graph("# triangle\nvertices 3\nedge 0 1\nedge 0 2 0.25\n\nedge 1 2 1\n");
    ASSERT_EQ(g.vertex_count(), 3u);
    ASSERT_EQ(g.edge_count(), 3u);
    EXPECT_EQ(g.edges()[0].bias, 0.5);
    EXPECT_EQ(g.edges()[1].bias, 0.25);
    EXPECT_EQ(g.edges()[2].bias, 1.0);
    std::ostringstream out;
    write_graph(out, g);
    EXPECT_EQ(parse_graph(out.str()), g);
}

TEST(GraphFormat, RejectionsNameTheLine) {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_graph(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("vertices 3\nedge 0 1\nedge 1 1\n"), 3u);       // self-loop
    EXPECT_EQ(line_of("vertices 3\nedge 0 1\nedge 1 0\n"), 3u);       // duplicate
    EXPECT_EQ(line_of("vertices 3\nedge 0 3\n"), 2u);                 // out of range
    EXPECT_EQ(line_of("vertices 3\nedge 0 1 1.5\n"), 2u);             // bias
    EXPECT_EQ(line_of("vertices 3\nedge 0 1 -0.1\n"), 2u);
    EXPECT_EQ(line_of("edge 0 1\n"), 1u);                             // no header
    EXPECT_EQ(line_of("vertices 3\n\nbogus 1 2\n"), 3u);
    EXPECT_EQ(line_of("vertices 3\nedge 0 1 x\n"), 2u);
    try {
        parse_graph("vertices 2\nedge 1 1\n");
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
    }
}

TEST(GraphCore, ConstructorValidates) {
    EXPECT_THROW(Graph(2, {{0, 0, 0.5}}), Error);
    EXPECT_THROW(Graph(2, {{0, 1, 0.5}, {1, 0, 0.5}}), Error);
    EXPECT_THROW(Graph(2, {{0, 2, 0.5}}), Error);
    EXPECT_THROW(Graph(2, {{0, 1, 1.01}}), Error);
}
