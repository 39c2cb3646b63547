#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "roperc/dyadic.hpp"
#include "roperc/error.hpp"
#include "roperc/joint.hpp"
#include "roperc/upsets.hpp"
#include "roperc/vertex_set.hpp"

namespace roperc {

inline constexpr double association_tolerance = 1e-12;

/// Minimizing pair of up-sets, as explicit point lists over the window coordinates.
/// For positive relation, `first` is the up-set {x_i = 1} and `conditioned_on` is i.
struct Witness {
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> second;
    std::optional<VertexId> conditioned_on;
};

struct AssociationReport {
    std::string kind;
    bool passed = true;
    double min_covariance = 0.0;
    std::optional<std::string> min_covariance_exact;
    std::optional<Witness> witness;
    std::uint64_t checks_performed = 0;
    std::vector<VertexId> window;
    std::vector<VertexId> skipped;
    double tolerance = association_tolerance;
};

/// Non-source vertices whose marginal lies strictly between 0 and 1, lowest ids
/// first, at most `cap` of them.
template <class Real>
VertexSet default_window(const JointDistribution<Real>& dist, std::size_t cap = max_upset_ground_size) {
    VertexSet window(dist.vertex_count());
    std::size_t taken = 0;
    for (VertexId i = 0; i < dist.vertex_count() && taken < cap; ++i) {
        if (dist.sources().contains(i)) continue;
        const Real m = marginal(dist, i);
        if (m > Real{0} && m < Real{1}) {
            window.insert(i);
            ++taken;
        }
    }
    return window;
}

namespace detail {

inline std::vector<std::uint32_t> points_of(std::uint32_t set) {
    std::vector<std::uint32_t> pts;
    for (std::uint32_t s = set; s != 0; s &= s - 1) pts.push_back(static_cast<std::uint32_t>(std::countr_zero(s)));
    return pts;
}

// P(A) for any subset A of a <= 32-point space, via two 16-point subset-sum tables.
class SubsetSums {
public:
    explicit SubsetSums(const std::vector<double>& pmf) {
        const std::size_t n = pmf.size();
        const std::size_t lo_pts = std::min<std::size_t>(n, 16);
        lo_ = build(pmf, 0, lo_pts);
        hi_ = n > 16 ? build(pmf, 16, n) : std::vector<double>{0.0};
    }
    double operator()(std::uint32_t set) const { return lo_[set & 0xFFFFu] + hi_[set >> 16]; }

private:
    static std::vector<double> build(const std::vector<double>& pmf, std::size_t first, std::size_t last) {
        std::vector<double> t(std::size_t{1} << (last - first), 0.0);
        for (std::size_t m = 1; m < t.size(); ++m)
            t[m] = t[m & (m - 1)] + pmf[first + static_cast<std::size_t>(std::countr_zero(m))];
        return t;
    }
    std::vector<double> lo_, hi_;
};

template <class Real>
Real exact_sum(const std::vector<Real>& pmf, std::uint32_t set) {
    Real t{0};
    for (std::uint32_t s = set; s != 0; s &= s - 1) t += pmf[static_cast<std::size_t>(std::countr_zero(s))];
    return t;
}

template <class Real>
std::vector<VertexId> checked_window(const JointDistribution<Real>& dist, const VertexSet& free_vertices) {
    if (free_vertices.size() != dist.vertex_count()) throw Error("window is over a different vertex count");
    auto window = free_vertices.members();
    if (window.size() > max_upset_ground_size)
        throw Error("association window capped at 5 vertices (got " + std::to_string(window.size()) + ")");
    return window;
}

inline std::vector<std::uint32_t> nonconstant_upsets(unsigned k) {
    const UpSetFamily family = enumerate_upsets(k);
    std::vector<std::uint32_t> out;
    for (auto u : family.upsets)
        if (u != 0 && u != family.full()) out.push_back(u);
    return out;
}

inline constexpr double exact_recheck_threshold = 1e-9;

} // namespace detail

/// Positive association of the window sub-vector: Cov(1_U, 1_W) >= -tolerance over
/// every pair of non-constant up-sets U, W of the window cube. Every increasing
/// function is a constant plus a nonnegative combination of up-set indicators, so
/// these pairs are sufficient. In exact mode, pairs that the double scan places
/// within 1e-9 of zero are re-evaluated exactly and decide the verdict.
template <class Real>
AssociationReport check_positive_association(const JointDistribution<Real>& dist, const VertexSet& free_vertices) {
    constexpr bool exact = std::is_same_v<Real, Dyadic>;
    AssociationReport report;
    report.kind = "positive_association";
    report.window = detail::checked_window(dist, free_vertices);
    const auto k = static_cast<unsigned>(report.window.size());

    const std::vector<Real> pmf = project(dist, report.window);
    std::vector<double> pmf_d;
    for (const auto& m : pmf) pmf_d.push_back(to_double(m));
    const detail::SubsetSums prob(pmf_d);
    const auto ups = detail::nonconstant_upsets(k);
    std::vector<double> p_up;
    for (auto u : ups) p_up.push_back(prob(u));

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    std::vector<std::pair<std::size_t, std::size_t>> near_zero;
    for (std::size_t a = 0; a < ups.size(); ++a) {
        for (std::size_t b = a; b < ups.size(); ++b) {
            const double cov = prob(ups[a] & ups[b]) - p_up[a] * p_up[b];
            if (cov < best) {
                best = cov;
                best_a = a;
                best_b = b;
            }
            if constexpr (exact) {
                if (cov <= detail::exact_recheck_threshold) near_zero.emplace_back(a, b);
            }
        }
    }
    report.checks_performed = ups.size() * (ups.size() + 1) / 2;
    if (ups.empty()) {
        report.min_covariance = 0.0;
        return report;
    }

    report.min_covariance = best;
    report.passed = best >= -report.tolerance;

    if constexpr (exact) {
        std::unordered_map<std::size_t, Dyadic> p_exact;
        auto pu = [&](std::size_t a) -> const Dyadic& {
            auto it = p_exact.find(a);
            if (it == p_exact.end()) it = p_exact.emplace(a, detail::exact_sum(pmf, ups[a])).first;
            return it->second;
        };
        auto cov_exact = [&](std::size_t a, std::size_t b) {
            return detail::exact_sum(pmf, ups[a] & ups[b]) - pu(a) * pu(b);
        };
        Dyadic min_exact = cov_exact(best_a, best_b);
        for (auto [a, b] : near_zero) {
            Dyadic c = cov_exact(a, b);
            if (c < min_exact) {
                min_exact = c;
                best_a = a;
                best_b = b;
            }
        }
        report.min_covariance = min_exact.to_double();
        report.min_covariance_exact = min_exact.str();
        report.passed = min_exact >= Dyadic{0};
    }
    report.witness = Witness{detail::points_of(ups[best_a]), detail::points_of(ups[best_b]), std::nullopt};
    return report;
}

/// For each window coordinate i with P(X_i = 1) > 0: the law of the window given
/// {X_i = 1} must dominate the unconditional law, i.e. P(U | X_i = 1) >= P(U) for
/// every up-set U. min_covariance holds the smallest gap P(U | X_i=1) - P(U).
template <class Real>
AssociationReport check_positive_relation(const JointDistribution<Real>& dist, const VertexSet& free_vertices) {
    constexpr bool exact = std::is_same_v<Real, Dyadic>;
    AssociationReport report;
    report.kind = "positive_relation";
    report.window = detail::checked_window(dist, free_vertices);
    const auto k = static_cast<unsigned>(report.window.size());

    const std::vector<Real> pmf = project(dist, report.window);
    std::vector<double> pmf_d;
    for (const auto& m : pmf) pmf_d.push_back(to_double(m));
    const detail::SubsetSums prob(pmf_d);
    const auto ups = detail::nonconstant_upsets(k);

    double best = std::numeric_limits<double>::infinity();
    std::optional<Witness> witness;
    bool exact_ok = true;
    for (std::uint32_t j = 0; j < k; ++j) {
        std::uint32_t coord = 0;  // up-set {x_j = 1}
        for (std::uint32_t x = 0; x < (1u << k); ++x)
            if ((x >> j) & 1u) coord |= 1u << x;
        const Real p_cond_exact = detail::exact_sum(pmf, coord);
        if (!(p_cond_exact > Real{0})) {
            report.skipped.push_back(report.window[j]);
            continue;
        }
        const double p_cond = prob(coord);
        for (auto u : ups) {
            const double gap = prob(u & coord) / p_cond - prob(u);
            ++report.checks_performed;
            if (gap < best) {
                best = gap;
                witness = Witness{detail::points_of(coord), detail::points_of(u), report.window[j]};
            }
            if constexpr (exact) {
                if (gap <= detail::exact_recheck_threshold) {
                    const Dyadic cov = detail::exact_sum(pmf, u & coord) - detail::exact_sum(pmf, u) * p_cond_exact;
                    if (cov < Dyadic{0}) exact_ok = false;
                }
            }
        }
    }
    if (!witness) return report;
    report.min_covariance = best;
    report.witness = witness;
    report.passed = exact ? exact_ok : best >= -report.tolerance;
    return report;
}

} // namespace roperc
