#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "roperc/association.hpp"
#include "roperc/joint.hpp"
#include "roperc/poisson.hpp"
#include "roperc/tree_sim.hpp"

namespace roperc {

using Json = nlohmann::json;

inline std::string hex_mask(std::uint64_t mask) {
    std::ostringstream s;
    s << "0x" << std::hex << mask;
    return s.str();
}

/// {"mass": {"0x3": 0.5, ...}} plus "mass_exact" fractions in exact mode.
template <class Real>
Json joint_to_json(const JointDistribution<Real>& dist) {
    Json j;
    j["vertex_count"] = dist.vertex_count();
    j["sources"] = dist.sources().members();
    j["arithmetic"] = std::is_same_v<Real, Dyadic> ? "exact" : "double";
    Json mass = Json::object();
    Json exact = Json::object();
    for (const auto& e : dist.entries()) {
        mass[hex_mask(e.wet)] = to_double(e.mass);
        if constexpr (std::is_same_v<Real, Dyadic>) exact[hex_mask(e.wet)] = e.mass.str();
    }
    j["mass"] = std::move(mass);
    if constexpr (std::is_same_v<Real, Dyadic>) j["mass_exact"] = std::move(exact);
    return j;
}

/// A window point becomes the list of window vertices that are wet in it.
inline Json points_to_json(const std::vector<std::uint32_t>& points, const std::vector<VertexId>& window) {
    Json arr = Json::array();
    for (auto x : points) {
        Json wet = Json::array();
        for (std::size_t j = 0; j < window.size(); ++j)
            if ((x >> j) & 1u) wet.push_back(window[j]);
        arr.push_back(std::move(wet));
    }
    return arr;
}

inline Json report_to_json(const AssociationReport& r) {
    Json j;
    j["kind"] = r.kind;
    j["passed"] = r.passed;
    j["min_covariance"] = r.min_covariance;
    if (r.min_covariance_exact) j["min_covariance_exact"] = *r.min_covariance_exact;
    j["checks_performed"] = r.checks_performed;
    j["window"] = r.window;
    j["tolerance"] = r.tolerance;
    if (!r.skipped.empty()) j["skipped"] = r.skipped;
    if (r.witness) {
        Json w;
        w["first"] = points_to_json(r.witness->first, r.window);
        w["second"] = points_to_json(r.witness->second, r.window);
        if (r.witness->conditioned_on) w["conditioned_on"] = *r.witness->conditioned_on;
        j["witness"] = std::move(w);
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline Json summary_to_json(const tree::MCSummary& s) {
    Json j;
    j["n"] = s.params.height;
    j["p"] = s.params.bias;
    j["samples"] = s.samples;
    j["seed"] = s.seed;
    j["generator"] = s.generator;
    j["mean_cluster"] = s.mean_cluster;
    j["var_cluster"] = s.var_cluster;
    j["mean_downwards"] = s.mean_downwards;
    j["var_downwards"] = s.var_downwards;
    j["root_wet_frequency"] = s.root_wet_frequency;
    Json h = Json::object();
    for (const auto& [v, c] : s.histogram) h[std::to_string(v)] = c;
    j["histogram"] = std::move(h);
    Json m = Json::object();
    for (const auto& [k, c] : s.max_level_counts) m[std::to_string(k)] = c;
    j["max_level_counts"] = std::move(m);
    return j;
}

inline Json diagnostics_to_json(const poisson::PoissonDiagnostics& d) {
    Json j;
    j["lambda"] = d.lambda;
    j["variance"] = d.variance;
    j["variance_source"] = d.variance_source;
    j["variance_standard_error"] = d.variance_standard_error;
    j["sum_p_squared"] = d.sum_p_squared;
    j["stein_chen_raw"] = d.stein_chen_raw;
    j["stein_chen_bound"] = d.stein_chen_bound;
    j["bound_clamped"] = d.bound_clamped;
    if (d.bound_clamped) j["warning"] = "negative Stein-Chen estimate clamped to 0";
    j["empirical_tv"] = d.empirical_tv;
    j["tv_standard_error"] = d.tv_standard_error;
    j["samples"] = d.samples;
    return j;
}

/// "value,count" rows; sizes above 2^16 are merged into power-of-two buckets
/// labelled by their lower end.
inline std::string histogram_csv(const std::map<std::uint64_t, std::uint64_t>& h) {
    constexpr std::uint64_t linear_limit = 1ULL << 16;
    std::map<std::uint64_t, std::uint64_t> rows;
    for (const auto& [v, c] : h) {
        std::uint64_t key = v;
        if (v > linear_limit) key = std::uint64_t{1} << (std::bit_width(v) - 1);
        rows[key] += c;
    }
    std::ostringstream s;
    s << "value,count\n";
    for (const auto& [v, c] : rows) s << v << ',' << c << '\n';
    return s.str();
}

} // namespace roperc
