#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "roperc/error.hpp"

// Closed forms for percolation from the leaves of the complete binary tree T_n whose
// edges point toward the root with probability p. Levels run from 0 (leaves) to n
// (root); clusters never count the leaves.
namespace roperc::tree {

struct TreeParams {
    unsigned height = 0;  // n
    double bias = 0.5;    // p = P(edge oriented toward the root)

    void validate() const {
        if (!(bias >= 0.0 && bias <= 1.0)) throw Error("tree bias p must lie in [0,1]");
    }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// rho_0 .. rho_n with rho_0 = 1 and rho_{k+1} = 2 p rho_k - (p rho_k)^2.
inline std::vector<double> rho_sequence(const TreeParams& params) {
    params.validate();
    std::vector<double> rho(params.height + 1);
    rho[0] = 1.0;
    const double p = params.bias;
    for (unsigned k = 0; k < params.height; ++k) {
        const double x = p * rho[k];
        rho[k + 1] = 2.0 * x - x * x;
    }
    return rho;
}

/// Limit of rho_n: 0 for p <= 1/2, (2p - 1)/p^2 above.
inline double fixed_point(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p must lie in [0,1]");
    return p <= 0.5 ? 0.0 : (2.0 * p - 1.0) / (p * p);
}

namespace detail {

inline void check_level(const TreeParams& params, unsigned k) {
    if (k > params.height)
        throw Error("level " + std::to_string(k) + " out of range [0," + std::to_string(params.height) + "]");
}

// Direct sum with running products:
//   (1-p) p sum_{i=0}^{n-1-k} (1-p)^i rho_{k+i} prod_{j<i} (1 - p rho_{k+j}).
inline double alpha_direct(const std::vector<double>& rho, double p, unsigned n, unsigned k) {
    CompensatedSum sum;
    double weight = 1.0;
    for (unsigned i = 0; k + i + 1 <= n; ++i) {
        sum.add(weight * rho[k + i]);
        weight *= (1.0 - p) * (1.0 - p * rho[k + i]);
    }
    return (1.0 - p) * p * sum.value();
}

} // namespace detail

/// Probability that water reaches a level-k vertex from its parent's side.
inline double alpha(const TreeParams& params, unsigned k) {
    detail::check_level(params, k);
    const auto rho = rho_sequence(params);
    return detail::alpha_direct(rho, params.bias, params.height, k);
}

/// Same quantity written as sum_{i=1}^{n-k} P(M = k + i), M being the level of the
/// lowest-indexed entry point on the path to the root. Each term is evaluated
/// independently with pow and an explicit product.
inline double alpha_by_entry_level(const TreeParams& params, unsigned k) {
    detail::check_level(params, k);
    const auto rho = rho_sequence(params);
    const double p = params.bias;
    CompensatedSum sum;
    for (unsigned i = 1; i <= params.height - k; ++i) {
        double prod = 1.0;
        for (unsigned j = 0; j + 2 <= i; ++j) prod *= 1.0 - p * rho[k + j];
        sum.add(std::pow(1.0 - p, static_cast<double>(i)) * p * rho[k + i - 1] * prod);
    }
    return sum.value();
}

/// All alpha_k in O(n) via alpha_k = (1-p) p rho_k + (1-p)(1 - p rho_k) alpha_{k+1}.
inline std::vector<double> alpha_table(const TreeParams& params) {
    const auto rho = rho_sequence(params);
    const double p = params.bias;
    std::vector<double> a(params.height + 1, 0.0);
    for (unsigned k = params.height; k-- > 0;)
        a[k] = (1.0 - p) * p * rho[k] + (1.0 - p) * (1.0 - p * rho[k]) * a[k + 1];
    return a;
}

/// P(level-k vertex is wet) = rho_k + (1 - rho_k) alpha_k.
inline double pi(const TreeParams& params, unsigned k) {
    detail::check_level(params, k);
    const auto rho = rho_sequence(params);
    const double a = detail::alpha_direct(rho, params.bias, params.height, k);
    return rho[k] + (1.0 - rho[k]) * a;
}

/// E|C_n down| = sum_{k=1}^n 2^{n-k} rho_k.
inline double expected_downwards(const TreeParams& params) {
    const auto rho = rho_sequence(params);
    CompensatedSum sum;
    for (unsigned k = 1; k <= params.height; ++k) sum.add(std::ldexp(rho[k], static_cast<int>(params.height - k)));
    return sum.value();
}

/// E|C_n| = sum_{k=1}^n 2^{n-k} pi_k.
inline double expected_cluster(const TreeParams& params) {
    const auto rho = rho_sequence(params);
    CompensatedSum sum;
    for (unsigned k = 1; k <= params.height; ++k) {
        const double a = detail::alpha_direct(rho, params.bias, params.height, k);
        sum.add(std::ldexp(rho[k] + (1.0 - rho[k]) * a, static_cast<int>(params.height - k)));
    }
    return sum.value();
}

struct RhoBounds {
    double lower;
    double upper;
};

/// e^{-2p/(1-2p)^2} (2p)^k <= rho_k <= (2p)^k, valid for p < 1/2.
inline RhoBounds rho_bounds(const TreeParams& params, unsigned k) {
    params.validate();
    if (!(params.bias < 0.5)) throw Error("bounds valid only for p < 1/2");
    const double p = params.bias;
    const double upper = std::pow(2.0 * p, static_cast<double>(k));
    const double lower = std::exp(-2.0 * p / ((1.0 - 2.0 * p) * (1.0 - 2.0 * p))) * upper;
    return {lower, upper};
}

/// P(l_max < k) = (1 - rho_k)^{2^{n-k}}; the 2^{n-k} level-k subtrees are independent.
inline double max_level_cdf(const TreeParams& params, unsigned k) {
    if (k < 1 || k > params.height)
        throw Error("level " + std::to_string(k) + " out of range [1," + std::to_string(params.height) + "]");
    const auto rho = rho_sequence(params);
    if (rho[k] >= 1.0) return 0.0;
    return std::exp(std::ldexp(std::log1p(-rho[k]), static_cast<int>(params.height - k)));
}

/// P(l_max = k) for k = 0..n, from the CDF (P(l_max < n+1) = 1).
inline std::vector<double> max_level_pmf(const TreeParams& params) {
    std::vector<double> cdf(params.height + 2, 0.0);  // cdf[k] = P(l_max < k)
    cdf[0] = 0.0;
    for (unsigned k = 1; k <= params.height; ++k) cdf[k] = max_level_cdf(params, k);
    cdf[params.height + 1] = 1.0;
    std::vector<double> pmf(params.height + 1);
    for (unsigned k = 0; k <= params.height; ++k) pmf[k] = cdf[k + 1] - cdf[k];
    return pmf;
}

/// kappa_n = log(2) n / log(1/p), the location the maximum level concentrates at.
inline double kappa(const TreeParams& params) {
    params.validate();
    if (params.bias <= 0.0 || params.bias >= 1.0) throw Error("kappa needs 0 < p < 1");
    return std::log(2.0) * static_cast<double>(params.height) / std::log(1.0 / params.bias);
}

/// floor(x + 1/2).
inline long long nint(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

struct TreeAnalytics {
    TreeParams params;
    std::vector<double> rho;
    std::vector<double> alpha;
    std::vector<double> pi;
    double expected_downwards = 0.0;
    double expected_cluster = 0.0;
};

inline TreeAnalytics compute_tree_analytics(const TreeParams& params) {
    TreeAnalytics t;
    t.params = params;
    t.rho = rho_sequence(params);
    t.alpha.resize(params.height + 1);
    t.pi.resize(params.height + 1);
    CompensatedSum down, full;
    for (unsigned k = 0; k <= params.height; ++k) {
        t.alpha[k] = detail::alpha_direct(t.rho, params.bias, params.height, k);
        t.pi[k] = t.rho[k] + (1.0 - t.rho[k]) * t.alpha[k];
        if (k >= 1) {
            const int scale = static_cast<int>(params.height - k);
            down.add(std::ldexp(t.rho[k], scale));
            full.add(std::ldexp(t.pi[k], scale));
        }
    }
    t.expected_downwards = down.value();
    t.expected_cluster = full.value();
    return t;
}

} // namespace roperc::tree
