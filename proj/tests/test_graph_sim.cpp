#include <cmath>

#include <gtest/gtest.h>

#include "roperc/corpus.hpp"
#include "roperc/graph_sim.hpp"
#include "roperc/joint.hpp"

using namespace roperc;

TEST(GraphSim, ForcedBiasesGiveForcedWetSet) {
    const Graph g(4, {{0, 1, 1.0}, {2, 1, 1.0}, {2, 3, 0.0}});
    auto rng = make_stream(1, 0, StreamTag::graph);
    const auto wet = simulate_graph_once(g, VertexSet(4, {0}), rng);
    EXPECT_EQ(wet, reachable_from(g, Orientation{{true, true, false}}, VertexSet(4, {0})));
    EXPECT_EQ(wet.members(), (std::vector<VertexId>{0, 1}));
}

TEST(GraphSim, TriangleJointFrequency) {
    GraphExperimentOptions opt;
    opt.samples = 100000;
    opt.seed = 99;
    const auto s = run_graph_experiment(corpus::triangle(0.5), VertexSet(3, {0}), opt);
    const double both = static_cast<double>(s.co_wet[1 * 3 + 2]) / opt.samples;
    EXPECT_NEAR(both, 0.5, 3 * std::sqrt(0.25 / opt.samples));
    EXPECT_NEAR(s.covariance(1, 2), 7.0 / 64.0, 0.01);
    EXPECT_EQ(s.wet_counts[0], opt.samples);
}

TEST(GraphSim, MarginalsMatchEnumeration) {
    GraphExperimentOptions opt;
    opt.samples = 20000;
    opt.seed = 3;
    for (const auto& [name, g] : corpus::validation_corpus(0.3)) {
        const VertexSet src(g.vertex_count(), {0});
        const auto d = enumerate_joint<double>(g, src);
        const auto s = run_graph_experiment(g, src, opt);
        for (VertexId i = 0; i < g.vertex_count(); ++i) {
            const double m = marginal(d, i);
            EXPECT_NEAR(s.frequency(i), m, 3.5 * std::sqrt(m * (1 - m) / opt.samples) + 1e-12) << name << " " << i;
        }
        std::uint64_t total = 0;
        for (const auto& [size, c] : s.size_histogram) total += c;
        EXPECT_EQ(total, opt.samples);
    }
}

TEST(GraphSim, IndependentOfThreadCount) {
    GraphExperimentOptions opt;
    opt.samples = 5000;
    opt.seed = 8;
    const Graph g = corpus::complete(5, 0.4);
    const VertexSet src(5, {0});
    const auto a = run_graph_experiment(g, src, opt);
    opt.threads = 4;
    const auto b = run_graph_experiment(g, src, opt);
    EXPECT_EQ(a.wet_counts, b.wet_counts);
    EXPECT_EQ(a.co_wet, b.co_wet);
    EXPECT_EQ(a.size_histogram, b.size_histogram);
}

TEST(EstimateCovariance, SmallSamples) {
    std::vector<VertexSet> runs{VertexSet(2, {0, 1}), VertexSet(2), VertexSet(2, {0}), VertexSet(2, {0, 1})};
    // x = 1,0,1,1 ; y = 1,0,0,1 ; means 3/4, 1/2
    EXPECT_NEAR(estimate_covariance(runs, 0, 1), (0.25 * 0.5 + 0.75 * 0.5 + 0.25 * -0.5 + 0.25 * 0.5) / 3, 1e-15);
    EXPECT_NEAR(estimate_covariance(runs, 0, 0), 0.25, 1e-15);
    EXPECT_THROW(estimate_covariance({VertexSet(2)}, 0, 1), Error);
}
