#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "roperc/corpus.hpp"
#include "roperc/joint.hpp"
#include "roperc/poisson.hpp"

using namespace roperc;
using namespace roperc::poisson;

TEST(Pmf, StableForLargeLambda) {
    EXPECT_NEAR(pmf(1.0, 0), std::exp(-1.0), 1e-16);
    EXPECT_NEAR(pmf(3.0, 2), 4.5 * std::exp(-3.0), 1e-16);
    // beyond exp underflow of e^{-lambda}
    const double big = 1000.0;
    double s = 0;
    for (std::uint64_t k = 800; k < 1200; ++k) s += pmf(big, k);
    EXPECT_NEAR(s, 1.0, 1e-9);
    const auto t = truncated_pmf(4.0);
    EXPECT_LT(t.tail, 1e-12);
    EXPECT_THROW(truncated_pmf(0.0), Error);
}

TEST(SteinChen, Arithmetic) {
    EXPECT_NEAR(stein_chen_bound(1.0, 1.0, 0.01), 0.02, 1e-15);
    EXPECT_EQ(stein_chen_bound(3.0, 3.0, 0.0), 0.0);
    EXPECT_NEAR(stein_chen_bound(4.0, 5.0, 0.5), 0.25 * 2.0, 1e-15);
    EXPECT_LT(stein_chen_raw(4.0, 3.0, 0.0), 0.0);
    EXPECT_EQ(stein_chen_bound(4.0, 3.0, 0.0), 0.0);
    try {
        stein_chen_bound(0.0, 1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "lambda ≤ 0");
    }
    EXPECT_THROW(stein_chen_bound(1.0, -1.0, 0.0), Error);
}

TEST(SumPiSquared, Limits) {
    EXPECT_EQ(sum_pi_squared({5, 1.0}), 31.0);
    EXPECT_EQ(sum_pi_squared({5, 0.0}), 0.0);
    const unsigned n = 3;
    const auto d = enumerate_joint<Dyadic>(corpus::binary_tree(n, 0.5), corpus::binary_tree_leaves(n));
    double s = 0;
    for (VertexId v = 0; v < 7; ++v) {
        const double m = marginal(d, v).to_double();
        s += m * m;
    }
    EXPECT_NEAR(sum_pi_squared({n, 0.5}), s, 1e-12);
}

TEST(EmpiricalTv, KnownValues) {
    // point mass at zero
    EXPECT_NEAR(empirical_tv_poisson(Histogram{{0, 100}}, 100, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    const std::vector<double> point{1.0};
    EXPECT_NEAR(empirical_tv_poisson(point, 1.0), 1.0 - std::exp(-1.0), 1e-12);
    // exact Poisson pmf as the empirical law
    const auto t = truncated_pmf(3.0);
    EXPECT_NEAR(empirical_tv_poisson(t.mass, 3.0), 0.0, 1e-12);
    // far away: disjoint supports
    EXPECT_NEAR(empirical_tv_poisson(Histogram{{500, 7}}, 7, 1.0), 1.0, 1e-12);
}

TEST(EmpiricalTv, SparseAndDenseAgree) {
    const Histogram h{{0, 10}, {1, 30}, {2, 25}, {3, 20}, {5, 10}, {9, 5}};
    std::vector<double> dense(10, 0.0);
    for (const auto& [k, c] : h) dense[k] = c / 100.0;
    for (double lambda : {0.5, 2.0, 6.0}) {
        const double a = empirical_tv_poisson(h, 100, lambda);
        EXPECT_NEAR(a, empirical_tv_poisson(dense, lambda), 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
    }
}

TEST(EmpiricalTv, SyntheticPoissonIsClose) {
    const double lambda = 4.0;
    const std::uint64_t n = 200000;
    const auto h = synthetic_histogram(lambda, n, 17, 1);
    EXPECT_LE(empirical_tv_poisson(h, n, lambda), 2 * std::sqrt(lambda / n));
    EXPECT_EQ(h, synthetic_histogram(lambda, n, 17, 4));
    EXPECT_GT(tv_standard_error(h, n, lambda), 0.0);
}

TEST(Variance, Estimate) {
    const auto v = variance_estimate(Histogram{{1, 2}, {3, 2}});
    EXPECT_DOUBLE_EQ(v.mean, 2.0);
    EXPECT_DOUBLE_EQ(v.variance, 4.0 / 3.0);
    EXPECT_GE(v.standard_error, 0.0);
}

TEST(Diagnose, TreeInSparseRegime) {
    tree::ExperimentOptions opt;
    opt.samples = 100000;
    opt.seed = 1;
    const auto r = diagnose_tree({12, 0.001}, opt);
    const auto& d = r.diagnostics;
    EXPECT_NEAR(d.lambda, tree::expected_cluster({12, 0.001}), 0);
    EXPECT_GT(d.lambda, 3.5);
    EXPECT_LT(d.lambda, 4.5);
    EXPECT_LE(d.empirical_tv, d.stein_chen_bound + 3 * d.combined_standard_error());
    EXPECT_LT(d.stein_chen_bound, 0.05);
    EXPECT_EQ(d.variance_source, "monte-carlo");
    EXPECT_THROW(diagnose_tree({12, 0.0}, opt), Error);
}
