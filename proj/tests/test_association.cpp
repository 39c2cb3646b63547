#include <algorithm>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roperc/association.hpp"
#include "roperc/corpus.hpp"

using namespace roperc;

namespace {

// Smallest covariance over all pairs of non-constant up-sets of the window,
// straight from the rational joint law.
oracle::Rational brute_min_covariance(const std::map<std::uint64_t, oracle::Rational>& law,
                                      const std::vector<VertexId>& window) {
    const unsigned k = static_cast<unsigned>(window.size());
    auto in_upset = [&](std::uint32_t u, std::uint64_t wet) {
        std::uint32_t x = 0;
        for (unsigned c = 0; c < k; ++c)
            if ((wet >> window[c]) & 1ULL) x |= 1u << c;
        return ((u >> x) & 1u) != 0;
    };
    auto prob = [&](auto pred) {
        oracle::Rational t = 0;
        for (const auto& [wet, m] : law)
            if (pred(wet)) t += m;
        return t;
    };
    const std::uint32_t full = k == 5 ? 0xffffffffu : (1u << (1u << k)) - 1;
    std::vector<std::uint32_t> ups;
    for (auto u : oracle::upsets_by_definition(k))
        if (u != 0 && u != full) ups.push_back(u);
    oracle::Rational best = 1;
    for (std::size_t a = 0; a < ups.size(); ++a)
        for (std::size_t b = a; b < ups.size(); ++b) {
            const auto both = prob([&](std::uint64_t w) { return in_upset(ups[a], w) && in_upset(ups[b], w); });
            const auto pa = prob([&](std::uint64_t w) { return in_upset(ups[a], w); });
            const auto pb = prob([&](std::uint64_t w) { return in_upset(ups[b], w); });
            const oracle::Rational cov = both - pa * pb;
            if (cov < best) best = cov;
        }
    return best;
}

} // namespace

TEST(Association, TriangleMinimumIsCoordinatePair) {
    const auto d = enumerate_joint<Dyadic>(corpus::triangle(0.5), VertexSet(3, {0}));
    const auto r = check_positive_association(d, VertexSet(3, {1, 2}));
    EXPECT_TRUE(r.passed);
    ASSERT_TRUE(r.min_covariance_exact.has_value());
    EXPECT_EQ(*r.min_covariance_exact, "7/64");
    EXPECT_DOUBLE_EQ(r.min_covariance, 7.0 / 64.0);
    EXPECT_EQ(r.checks_performed, 10u);  // 4 non-constant up-sets, unordered pairs with repeats
    ASSERT_TRUE(r.witness.has_value());
    // {x_a = 1} and {x_b = 1} as point lists over (a, b)
    auto first = r.witness->first, second = r.witness->second;
    if (first > second) std::swap(first, second);
    EXPECT_EQ(first, (std::vector<std::uint32_t>{1, 3}));
    EXPECT_EQ(second, (std::vector<std::uint32_t>{2, 3}));
}

TEST(Association, ProductMeasureHasNoNegativeCovariance) {
    // two disjoint edges, each with its own source
    const Graph g(4, {{0, 1, 0.3}, {2, 3, 0.6}});
    const auto d = enumerate_joint<double>(g, VertexSet(4, {0, 2}));
    EXPECT_NEAR(pair_covariance(d, 1, 3), 0.0, 1e-16);
    const auto r = check_positive_association(d, VertexSet(4, {1, 3}));
    EXPECT_TRUE(r.passed);
    EXPECT_GE(r.min_covariance, -1e-16);
    EXPECT_FALSE(r.min_covariance_exact.has_value());
}

TEST(Association, MatchesBruteForceOnSmallWindows) {
    for (double p : {0.25, 0.5, 0.75}) {
        for (const auto& [name, g] : corpus::validation_corpus(p)) {
            if (g.vertex_count() > 5) continue;
            const auto d = enumerate_joint<Dyadic>(g, VertexSet(g.vertex_count(), {0}));
            const auto window = default_window(d);
            if (window.count() > 4) continue;
            const auto r = check_positive_association(d, window);
            const auto ref = brute_min_covariance(oracle::joint(g, 1), window.members());
            if (window.count() == 0) continue;
            EXPECT_NEAR(r.min_covariance, ref.convert_to<double>(), 1e-15) << name << " p=" << p;
            EXPECT_EQ(r.passed, ref >= 0) << name;
        }
    }
}

TEST(Association, DefaultWindowSkipsSourcesAndConstants) {
    // vertex 3 is isolated, so it is never wet
    const Graph g(4, {{0, 1, 0.5}, {1, 2, 1.0}});
    const auto d = enumerate_joint<Dyadic>(g, VertexSet(4, {0}));
    EXPECT_EQ(default_window(d).members(), (std::vector<VertexId>{1, 2}));
    EXPECT_EQ(default_window(d, 1).members(), (std::vector<VertexId>{1}));
}

TEST(Association, WindowCap) {
    const auto d = enumerate_joint<double>(corpus::path(7, 0.5), VertexSet(7, {0}));
    try {
        check_positive_association(d, VertexSet(7, {1, 2, 3, 4, 5, 6}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()).rfind("association window capped at 5 vertices", 0), 0u);
    }
    EXPECT_THROW(check_positive_relation(d, VertexSet(7, {1, 2, 3, 4, 5, 6})), Error);
}

TEST(Association, EveryFiveVertexWindowOfTheHeightTwoTree) {
    // T_2 with one leaf as source leaves six free vertices; cover all C(6,5) windows.
    const Graph t2 = corpus::binary_tree(2, 0.5);
    const auto d = enumerate_joint<Dyadic>(t2, VertexSet(7, {3}));
    std::vector<VertexId> free;
    for (VertexId i = 0; i < 7; ++i)
        if (i != 3) free.push_back(i);
    for (std::size_t drop = 0; drop < free.size(); ++drop) {
        VertexSet w(7);
        for (std::size_t j = 0; j < free.size(); ++j)
            if (j != drop) w.insert(free[j]);
        const auto r = check_positive_association(d, w);
        EXPECT_TRUE(r.passed) << "dropped " << free[drop];
        EXPECT_EQ(r.checks_performed, 7579u * 7580u / 2u);
        EXPECT_TRUE(check_positive_relation(d, w).passed);
    }
}

TEST(Relation, TriangleConditionalProbability) {
    const auto d = enumerate_joint<Dyadic>(corpus::triangle(0.5), VertexSet(3, {0}));
    // P(b | a) = (1/2) / (5/8)
    const Dyadic pa = marginal(d, 1);
    EXPECT_EQ(pair_probability(d, 1, 2) * Dyadic(5), pa * Dyadic(4));
    const auto r = check_positive_relation(d, VertexSet(3, {1, 2}));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.checks_performed, 8u);
    // the smallest gap over both coordinates is 4/5 - 5/8 reached at U = {x_b = 1}, or its mirror
    EXPECT_GE(r.min_covariance, 0.0);
    EXPECT_LE(r.min_covariance, 4.0 / 5.0 - 5.0 / 8.0 + 1e-15);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_TRUE(r.witness->conditioned_on.has_value());
}

TEST(Relation, AllWetIsTrivial) {
    const auto d = enumerate_joint<Dyadic>(corpus::star(3, 1.0), VertexSet(4, {0}));
    const auto r = check_positive_relation(d, VertexSet(4, {1, 2, 3}));
    EXPECT_TRUE(r.passed);
    EXPECT_DOUBLE_EQ(r.min_covariance, 0.0);
}

TEST(Relation, NeverWetVertexIsSkipped) {
    const Graph g(3, {{0, 1, 0.5}, {1, 2, 0.0}});
    const auto d = enumerate_joint<Dyadic>(g, VertexSet(3, {0}));
    const auto r = check_positive_relation(d, VertexSet(3, {1, 2}));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.skipped, (std::vector<VertexId>{2}));
}

TEST(Association, SmallCorpusAcrossBiases) {
    for (int step = 1; step <= 9; ++step) {
        const double p = step / 10.0;
        for (const auto& [name, g] : corpus::validation_corpus(p)) {
            if (g.vertex_count() > 4) continue;
            for (VertexId s = 0; s < g.vertex_count(); ++s) {
                const auto d = enumerate_joint<double>(g, VertexSet(g.vertex_count(), {s}));
                const auto w = default_window(d);
                EXPECT_TRUE(check_positive_association(d, w).passed) << name << " p=" << p << " s=" << s;
                EXPECT_TRUE(check_positive_relation(d, w).passed) << name << " p=" << p << " s=" << s;
            }
        }
    }
}
