#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "roperc/error.hpp"
#include "roperc/parallel.hpp"
#include "roperc/random.hpp"
#include "roperc/tree_analytics.hpp"
#include "roperc/tree_sim.hpp"

namespace roperc::poisson {

using Histogram = std::map<std::uint64_t, std::uint64_t>;

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw Error("lambda ≤ 0");
}

/// e^{-lambda} lambda^k / k!, evaluated in log space.
inline double pmf(double lambda, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

/// Poisson(lambda) masses 0..K, where K is the first index past the mean whose
/// upper tail sum_{j>K} is below `tail`. Also returns that tail.
struct TruncatedPmf {
    std::vector<double> mass;
    double tail = 0.0;
};

inline TruncatedPmf truncated_pmf(double lambda, double tail = 1e-12) {
    check_lambda(lambda);
    // Log-space recurrence out to where terms are negligible, then tails from the top.
    std::vector<double> m;
    double logp = -lambda;
    const double loglam = std::log(lambda);
    for (std::uint64_t k = 0;; ++k) {
        if (k > 0) logp += loglam - std::log(static_cast<double>(k));
        m.push_back(std::exp(logp));
        if (static_cast<double>(k) > lambda && m.back() < 1e-300) break;
        if (static_cast<double>(k) > lambda && m.back() < tail * 1e-6 && k > lambda + 10) break;
    }
    std::vector<double> upper(m.size() + 1, 0.0);  // upper[k] = sum_{j >= k} m[j]
    for (std::size_t k = m.size(); k-- > 0;) upper[k] = upper[k + 1] + m[k];
    std::size_t K = static_cast<std::size_t>(std::ceil(lambda));
    while (K + 1 < m.size() && upper[K + 1] >= tail) ++K;
    TruncatedPmf out;
    out.mass.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(std::min(K + 1, m.size())));
    out.tail = upper[std::min(K + 1, m.size())];
    return out;
}

/// d_TV between an empirical law on {0,1,..} (dense, index = value) and
/// Poisson(lambda): half the L1 distance over 0..K plus half the tails beyond K.
inline double empirical_tv_poisson(std::span<const double> empirical, double lambda) {
    const TruncatedPmf ref = truncated_pmf(lambda);
    const std::size_t K = std::max(ref.mass.size(), empirical.size());
    double l1 = 0.0, ref_tail = ref.tail;
    for (std::size_t k = 0; k < K; ++k) {
        const double h = k < empirical.size() ? empirical[k] : 0.0;
        double q = 0.0;
        if (k < ref.mass.size()) {
            q = ref.mass[k];
        } else {
            q = pmf(lambda, k);
            ref_tail -= q;
        }
        l1 += std::fabs(h - q);
    }
    return std::clamp(0.5 * (l1 + std::max(0.0, ref_tail)), 0.0, 1.0);
}

/// Same distance for a sparse histogram. With Poisson mass summing to 1,
///   sum_k |h_k - q_k| = 1 + sum_{k in hist} (|h_k - q_k| - q_k),
/// so no truncation point is needed even for very large lambda.
inline double empirical_tv_poisson(const Histogram& histogram, std::uint64_t samples, double lambda) {
    if (samples < 1) throw Error("samples must be >= 1");
    check_lambda(lambda);
    double acc = 1.0;
    for (const auto& [k, c] : histogram) {
        const double h = static_cast<double>(c) / static_cast<double>(samples);
        const double q = pmf(lambda, k);
        acc += std::fabs(h - q) - q;
    }
    return std::clamp(0.5 * acc, 0.0, 1.0);
}

/// Delta-method standard error of the histogram TV estimate: with s_k the sign of
/// (h_k - q_k) held fixed, TV = 1/2 sum s_k (h_k - q_k) and Var = Var(s(Z)) / (4N).
inline double tv_standard_error(const Histogram& histogram, std::uint64_t samples, double lambda) {
    check_lambda(lambda);
    double es = 0.0, es2 = 0.0;
    for (const auto& [k, c] : histogram) {
        const double h = static_cast<double>(c) / static_cast<double>(samples);
        const double d = h - pmf(lambda, k);
        const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        es += s * h;
        es2 += s * s * h;
    }
    return 0.5 * std::sqrt(std::max(0.0, es2 - es * es) / static_cast<double>(samples));
}

/// Mean, unbiased variance and the standard error of that variance, sqrt((m4 - s^4)/N).
struct VarianceEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double standard_error = 0.0;
};

inline VarianceEstimate variance_estimate(const Histogram& histogram) {
    long double n = 0, s1 = 0;
    for (const auto& [k, c] : histogram) {
        n += c;
        s1 += static_cast<long double>(k) * c;
    }
    VarianceEstimate v;
    if (n < 2) return v;
    const long double mean = s1 / n;
    long double m2 = 0, m4 = 0;
    for (const auto& [k, c] : histogram) {
        const long double d = static_cast<long double>(k) - mean;
        m2 += d * d * c;
        m4 += d * d * d * d * c;
    }
    v.mean = static_cast<double>(mean);
    v.variance = static_cast<double>(m2 / (n - 1));
    const long double pop2 = m2 / n;
    v.standard_error = static_cast<double>(std::sqrt(std::max<long double>(0, m4 / n - pop2 * pop2) / n));
    return v;
}

/// min{1, 1/lambda} (Var W - lambda + 2 sum p_i^2), before clamping.
inline double stein_chen_raw(double lambda, double variance, double sum_p_squared) {
    check_lambda(lambda);
    if (!(variance >= 0.0)) throw Error("variance must be >= 0");
    return std::min(1.0, 1.0 / lambda) * (variance - lambda + 2.0 * sum_p_squared);
}

/// Stein-Chen bound on d_TV(W, Poisson(lambda)) for positively related indicators,
/// clamped below at 0 (negative values only come from estimation error).
inline double stein_chen_bound(double lambda, double variance, double sum_p_squared) {
    return std::max(0.0, stein_chen_raw(lambda, variance, sum_p_squared));
}

/// sum over non-leaf vertices of P(X_v)^2 = sum_{k=1}^n 2^{n-k} pi_k^2.
inline double sum_pi_squared(const tree::TreeParams& params) {
    const auto t = tree::compute_tree_analytics(params);
    tree::CompensatedSum sum;
    for (unsigned k = 1; k <= params.height; ++k)
        sum.add(std::ldexp(t.pi[k] * t.pi[k], static_cast<int>(params.height - k)));
    return sum.value();
}

struct PoissonDiagnostics {
    double lambda = 0.0;
    double variance = 0.0;
    std::string variance_source = "monte-carlo";
    double variance_standard_error = 0.0;
    double sum_p_squared = 0.0;
    double stein_chen_raw = 0.0;
    double stein_chen_bound = 0.0;
    bool bound_clamped = false;
    double empirical_tv = 0.0;
    double tv_standard_error = 0.0;
    std::uint64_t samples = 0;

    /// Standard error of (bound - tv), used for the statistical bound check.
    double combined_standard_error() const {
        const double sb = std::min(1.0, 1.0 / lambda) * variance_standard_error;
        return std::sqrt(sb * sb + tv_standard_error * tv_standard_error);
    }
};

inline PoissonDiagnostics diagnose(double lambda, double sum_p_squared, const Histogram& histogram,
                                   std::uint64_t samples) {
    check_lambda(lambda);
    PoissonDiagnostics d;
    d.lambda = lambda;
    d.sum_p_squared = sum_p_squared;
    d.samples = samples;
    const VarianceEstimate v = variance_estimate(histogram);
    d.variance = v.variance;
    d.variance_standard_error = v.standard_error;
    d.stein_chen_raw = stein_chen_raw(lambda, v.variance, sum_p_squared);
    d.stein_chen_bound = std::max(0.0, d.stein_chen_raw);
    d.bound_clamped = d.stein_chen_raw < 0.0;
    d.empirical_tv = empirical_tv_poisson(histogram, samples, lambda);
    d.tv_standard_error = tv_standard_error(histogram, samples, lambda);
    return d;
}

struct TreeDiagnosis {
    PoissonDiagnostics diagnostics;
    tree::MCSummary summary;
};

/// lambda and sum p^2 from the closed forms, variance and histogram from simulation.
inline TreeDiagnosis diagnose_tree(const tree::TreeParams& params, const tree::ExperimentOptions& options) {
    params.validate();
    const double lambda = tree::expected_cluster(params);
    check_lambda(lambda);
    tree::MCSummary mc = tree::run_tree_experiment(params, options);
    PoissonDiagnostics d = diagnose(lambda, sum_pi_squared(params), mc.histogram, mc.samples);
    return {d, std::move(mc)};
}

/// Histogram of `samples` Poisson(lambda) draws, block-seeded like the simulators.
inline Histogram synthetic_histogram(double lambda, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    check_lambda(lambda);
    if (samples < 1) throw Error("samples must be >= 1");
    auto parts = parallel_map(static_cast<std::size_t>(block_count(samples)), threads, [&](std::size_t b) {
        Engine rng = make_stream(seed, b, StreamTag::poisson_synthetic);
        std::poisson_distribution<std::uint64_t> draw(lambda);
        Histogram h;
        const std::uint64_t n = block_samples(samples, b);
        for (std::uint64_t i = 0; i < n; ++i) ++h[draw(rng)];
        return h;
    });
    Histogram total;
    for (const auto& h : parts)
        for (const auto& [k, c] : h) total[k] += c;
    return total;
}

} // namespace roperc::poisson
