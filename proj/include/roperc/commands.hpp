#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "roperc/association.hpp"
#include "roperc/graph.hpp"
#include "roperc/graph_sim.hpp"
#include "roperc/joint.hpp"
#include "roperc/json_io.hpp"
#include "roperc/parallel.hpp"
#include "roperc/poisson.hpp"
#include "roperc/tree_analytics.hpp"
#include "roperc/tree_sim.hpp"

namespace roperc::cli {

inline constexpr const char* code_version = "0.1.0";

enum class Command { check, tree_analytic, tree_simulate, graph_simulate, poisson };
enum class Format { json, csv };

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_check_failed = 2;

struct RunConfig {
    Command command = Command::check;
    std::optional<std::string> graph_path;
    std::vector<VertexId> sources;
    std::optional<unsigned> n;
    std::optional<double> p;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    Format format = Format::json;
    std::optional<std::string> output_path;
    bool timestamp = true;

    // check
    std::vector<VertexId> window;
    Arithmetic arithmetic = Arithmetic::automatic;
    std::optional<std::size_t> edge_cap;
    // tree-simulate / poisson
    std::optional<unsigned> max_height;
    std::optional<std::string> csv_prefix;
    // poisson
    bool synthetic = false;
    std::optional<double> lambda;
};

struct CommandResult {
    int exit_code = exit_ok;
    std::string output;  // document for stdout or --out
    std::string error;   // message for stderr
    std::vector<std::pair<std::string, std::string>> extra_files;  // path, content
};

inline const char* command_name(Command c) {
    switch (c) {
    case Command::check: return "check";
    case Command::tree_analytic: return "tree-analytic";
    case Command::tree_simulate: return "tree-simulate";
    case Command::graph_simulate: return "graph-simulate";
    case Command::poisson: return "poisson";
    }
    return "?";
}

/// Every command accepts exactly the fields it uses; anything else is rejected with
/// a message naming the flag.
inline void validate(const RunConfig& c) {
    const std::string name = command_name(c.command);
    auto require = [&](bool present, const char* flag) {
        if (!present) throw Error(name + " requires " + flag);
    };
    auto forbid = [&](bool present, const char* flag) {
        if (present) throw Error(std::string(flag) + " is not used by " + name);
    };
    const bool graph_cmd = c.command == Command::check || c.command == Command::graph_simulate;
    const bool tree_cmd = !graph_cmd;
    const bool sampling = c.command == Command::tree_simulate || c.command == Command::graph_simulate ||
                          c.command == Command::poisson;

    if (graph_cmd) {
        require(c.graph_path.has_value(), "--graph");
        require(!c.sources.empty(), "--sources");
    } else {
        forbid(c.graph_path.has_value(), "--graph");
        forbid(!c.sources.empty(), "--sources");
    }
    const bool synthetic = c.command == Command::poisson && c.synthetic;
    if (tree_cmd && !synthetic) {
        require(c.n.has_value(), "-n");
        require(c.p.has_value(), "-p");
        if (*c.p < 0.0 || *c.p > 1.0) throw Error("-p must lie in [0,1]");
        if (*c.n < 1) throw Error("-n must be >= 1");
    } else {
        forbid(c.n.has_value(), "-n");
        forbid(c.p.has_value(), "-p");
    }
    if (sampling) {
        require(c.samples.has_value(), "--samples");
        if (*c.samples < 1) throw Error("--samples must be >= 1");
    } else {
        forbid(c.samples.has_value(), "--samples");
        forbid(c.seed.has_value(), "--seed");
    }
    if (c.command != Command::check) {
        forbid(!c.window.empty(), "--window");
        forbid(c.arithmetic != Arithmetic::automatic, "--arithmetic");
        forbid(c.edge_cap.has_value(), "--edge-cap");
    }
    if (c.command != Command::tree_simulate && c.command != Command::poisson) forbid(c.max_height.has_value(), "--max-height");
    if (c.command != Command::tree_simulate) forbid(c.csv_prefix.has_value(), "--csv-prefix");
    if (c.command != Command::poisson) {
        forbid(c.synthetic, "--synthetic");
        forbid(c.lambda.has_value(), "--lambda");
    } else if (synthetic) {
        require(c.lambda.has_value(), "--lambda (with --synthetic)");
        forbid(c.max_height.has_value(), "--max-height");
    } else {
        forbid(c.lambda.has_value(), "--lambda (only with --synthetic)");
    }
    if (c.threads && *c.threads < 1) throw Error("--threads must be >= 1");
    if (c.command == Command::poisson && c.format == Format::csv) throw Error("poisson only emits json");
}

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

inline Json metadata(const RunConfig& c) {
    Json m;
    m["command"] = command_name(c.command);
    m["code_version"] = code_version;
    if (c.timestamp) m["timestamp"] = utc_timestamp();
    return m;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline unsigned threads_of(const RunConfig& c) { return c.threads.value_or(default_thread_count()); }

inline VertexSet sources_of(const Graph& g, const std::vector<VertexId>& ids) {
    for (VertexId v : ids)
        if (v >= g.vertex_count())
            throw Error("source " + std::to_string(v) + " out of range (graph has " +
                        std::to_string(g.vertex_count()) + " vertices)");
    return VertexSet::from_members(g.vertex_count(), ids);
}

inline std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

template <class Real>
CommandResult check_with(const RunConfig& c, const Graph& graph, const JointDistribution<Real>& dist) {
    constexpr bool exact = std::is_same_v<Real, Dyadic>;
    const VertexSet window = c.window.empty() ? default_window(dist)
                                              : VertexSet::from_members(graph.vertex_count(), c.window);
    const AssociationReport assoc = check_positive_association(dist, window);
    const AssociationReport rel = check_positive_relation(dist, window);

    Json marginals = Json::array();
    std::vector<Real> m;
    for (VertexId i = 0; i < graph.vertex_count(); ++i) {
        m.push_back(marginal(dist, i));
        Json row{{"vertex", i}, {"probability", to_double(m.back())}};
        if constexpr (exact) row["exact"] = m.back().str();
        marginals.push_back(std::move(row));
    }

    Json pairs = Json::array();
    bool pairs_ok = true;
    double min_pair = 0.0;
    bool any_pair = false;
    for (VertexId i = 0; i < graph.vertex_count(); ++i) {
        for (VertexId j = i + 1; j < graph.vertex_count(); ++j) {
            const Real both = pair_probability(dist, i, j);
            const Real cov = both - m[i] * m[j];
            Json row{{"i", i}, {"j", j}, {"joint", to_double(both)}, {"covariance", to_double(cov)}};
            if constexpr (exact) {
                row["joint_exact"] = both.str();
                row["covariance_exact"] = cov.str();
                if (cov < Dyadic{0}) pairs_ok = false;
            } else {
                if (cov < -association_tolerance) pairs_ok = false;
            }
            if (!any_pair || to_double(cov) < min_pair) min_pair = to_double(cov);
            any_pair = true;
            pairs.push_back(std::move(row));
        }
    }

    const bool passed = assoc.passed && rel.passed && pairs_ok;
    CommandResult r;
    r.exit_code = passed ? exit_ok : exit_check_failed;
    if (c.format == Format::csv) {
        std::ostringstream s;
        s << "vertex,marginal\n";
        for (VertexId i = 0; i < graph.vertex_count(); ++i) s << i << ',' << fmt(to_double(m[i])) << '\n';
        r.output = s.str();
    } else {
        Json j = metadata(c);
        j["graph"] = {{"vertices", graph.vertex_count()}, {"edges", graph.edge_count()}};
        j["sources"] = dist.sources().members();
        j["arithmetic"] = exact ? "exact" : "double";
        j["marginals"] = std::move(marginals);
        j["pairs"] = std::move(pairs);
        j["min_pair_covariance"] = min_pair;
        j["joint"] = joint_to_json(dist);
        j["association"] = report_to_json(assoc);
        j["relation"] = report_to_json(rel);
        j["min_covariance"] = assoc.min_covariance;
        j["witness"] = report_to_json(assoc)["witness"];
        j["checks_performed"] = assoc.checks_performed + rel.checks_performed;
        j["passed"] = passed;
        r.output = dump(j);
    }
    if (!passed) r.error = "positive-dependence check failed; see report";
    return r;
}

} // namespace detail

/// Exact joint law plus association, relation and pairwise checks on a graph file.
inline CommandResult cmd_check(const RunConfig& c) {
    const Graph graph = read_graph_file(*c.graph_path);
    const VertexSet sources = detail::sources_of(graph, c.sources);
    EnumerationOptions opts;
    opts.threads = detail::threads_of(c);
    if (c.edge_cap) opts.edge_cap = *c.edge_cap;
    AnyJoint dist = enumerate_joint_auto(graph, sources, c.arithmetic, opts);
    return std::visit([&](const auto& d) { return detail::check_with(c, graph, d); }, dist);
}

inline CommandResult cmd_tree_analytic(const RunConfig& c) {
    const tree::TreeParams params{*c.n, *c.p};
    const tree::TreeAnalytics t = tree::compute_tree_analytics(params);
    CommandResult r;
    if (c.format == Format::csv) {
        std::ostringstream s;
        s << "k,rho_k,alpha_k,pi_k,weighted_pi_k\n";
        for (unsigned k = 0; k <= params.height; ++k)
            s << k << ',' << detail::fmt(t.rho[k]) << ',' << detail::fmt(t.alpha[k]) << ',' << detail::fmt(t.pi[k])
              << ',' << detail::fmt(std::ldexp(t.pi[k], static_cast<int>(params.height - k))) << '\n';
        r.output = s.str();
        return r;
    }
    Json j = detail::metadata(c);
    j["n"] = params.height;
    j["p"] = params.bias;
    j["expected_downwards"] = t.expected_downwards;
    j["expected_cluster"] = t.expected_cluster;
    j["fixed_point"] = tree::fixed_point(params.bias);
    if (params.bias > 0.0 && params.bias < 1.0) {
        const double kap = tree::kappa(params);
        const long long c0 = tree::nint(kap);
        auto cdf = [&](long long k) {
            if (k <= 0) return 0.0;
            if (k > static_cast<long long>(params.height)) return 1.0;
            return tree::max_level_cdf(params, static_cast<unsigned>(k));
        };
        j["kappa"] = kap;
        j["kappa_nint"] = c0;
        Json cdfs = Json::object();
        for (long long k = c0 - 1; k <= c0 + 1; ++k)
            if (k >= 1 && k <= static_cast<long long>(params.height)) cdfs[std::to_string(k)] = cdf(k);
        j["max_level_cdf"] = std::move(cdfs);  // P(l_max < k)
        j["predicted_max_levels"] = {c0 - 1, c0};
        j["prob_predicted_max_levels"] = cdf(c0 + 1) - cdf(c0 - 1);
    } else {
        j["kappa"] = nullptr;
    }
    Json rows = Json::array();
    for (unsigned k = 0; k <= params.height; ++k)
        rows.push_back({{"k", k},
                        {"rho_k", t.rho[k]},
                        {"alpha_k", t.alpha[k]},
                        {"pi_k", t.pi[k]},
                        {"weighted_pi_k", std::ldexp(t.pi[k], static_cast<int>(params.height - k))}});
    j["table"] = std::move(rows);
    r.output = detail::dump(j);
    return r;
}

inline tree::ExperimentOptions experiment_options(const RunConfig& c) {
    tree::ExperimentOptions o;
    o.samples = *c.samples;
    o.seed = c.seed.value_or(0);
    o.threads = detail::threads_of(c);
    o.max_height = c.max_height.value_or(tree::default_max_height);
    return o;
}

inline std::string max_level_csv(const tree::MCSummary& s) {
    std::ostringstream out;
    out << "value,count\n";
    for (const auto& [k, n] : s.max_level_counts) out << k << ',' << n << '\n';
    return out.str();
}

inline CommandResult cmd_tree_simulate(const RunConfig& c) {
    const tree::TreeParams params{*c.n, *c.p};
    const tree::MCSummary s = tree::run_tree_experiment(params, experiment_options(c));
    CommandResult r;
    if (c.format == Format::csv) {
        r.output = histogram_csv(s.histogram);
    } else {
        Json j = detail::metadata(c);
        j.update(summary_to_json(s));
        r.output = detail::dump(j);
    }
    if (c.csv_prefix) {
        r.extra_files.emplace_back(*c.csv_prefix + "_histogram.csv", histogram_csv(s.histogram));
        r.extra_files.emplace_back(*c.csv_prefix + "_max_level.csv", max_level_csv(s));
    }
    return r;
}

inline CommandResult cmd_graph_simulate(const RunConfig& c) {
    const Graph graph = read_graph_file(*c.graph_path);
    const VertexSet sources = detail::sources_of(graph, c.sources);
    GraphExperimentOptions o;
    o.samples = *c.samples;
    o.seed = c.seed.value_or(0);
    o.threads = detail::threads_of(c);
    const GraphMCSummary s = run_graph_experiment(graph, sources, o);
    CommandResult r;
    if (c.format == Format::csv) {
        std::ostringstream out;
        out << "vertex,wet_frequency\n";
        for (VertexId i = 0; i < graph.vertex_count(); ++i) out << i << ',' << detail::fmt(s.frequency(i)) << '\n';
        r.output = out.str();
        return r;
    }
    Json j = detail::metadata(c);
    j["samples"] = s.samples;
    j["seed"] = s.seed;
    j["generator"] = std::string(generator_name);
    j["sources"] = sources.members();
    Json freq = Json::array();
    for (VertexId i = 0; i < graph.vertex_count(); ++i) freq.push_back(s.frequency(i));
    j["wet_frequency"] = std::move(freq);
    if (graph.vertex_count() <= 64) {
        Json cov = Json::array();
        for (VertexId i = 0; i < graph.vertex_count(); ++i) {
            Json row = Json::array();
            for (VertexId k = 0; k < graph.vertex_count(); ++k) row.push_back(s.covariance(i, k));
            cov.push_back(std::move(row));
        }
        j["covariance"] = std::move(cov);
    }
    Json h = Json::object();
    for (const auto& [k, n] : s.size_histogram) h[std::to_string(k)] = n;
    j["size_histogram"] = std::move(h);
    r.output = detail::dump(j);
    return r;
}

inline CommandResult cmd_poisson(const RunConfig& c) {
    Json j = detail::metadata(c);
    const std::uint64_t seed = c.seed.value_or(0);
    if (c.synthetic) {
        const double lambda = *c.lambda;
        const auto hist = poisson::synthetic_histogram(lambda, *c.samples, seed, detail::threads_of(c));
        poisson::PoissonDiagnostics d = poisson::diagnose(lambda, 0.0, hist, *c.samples);
        d.variance_source = "monte-carlo (synthetic Poisson draws)";
        j.update(diagnostics_to_json(d));
        j["mode"] = "synthetic";
        j["seed"] = seed;
        j["generator"] = std::string(generator_name);
        j["noise_bound"] = 2.0 * std::sqrt(lambda / static_cast<double>(*c.samples));
    } else {
        const tree::TreeParams params{*c.n, *c.p};
        const auto result = poisson::diagnose_tree(params, experiment_options(c));
        j.update(diagnostics_to_json(result.diagnostics));
        j["mode"] = "tree";
        j["n"] = params.height;
        j["p"] = params.bias;
        j["seed"] = seed;
        j["generator"] = std::string(generator_name);
        j["mean_cluster"] = result.summary.mean_cluster;
    }
    CommandResult r;
    r.output = detail::dump(j);
    return r;
}

/// Validates, dispatches and maps errors onto the exit-code contract.
inline CommandResult run_command(const RunConfig& c) {
    try {
        validate(c);
        switch (c.command) {
        case Command::check: return cmd_check(c);
        case Command::tree_analytic: return cmd_tree_analytic(c);
        case Command::tree_simulate: return cmd_tree_simulate(c);
        case Command::graph_simulate: return cmd_graph_simulate(c);
        case Command::poisson: return cmd_poisson(c);
        }
    } catch (const std::exception& e) {
        CommandResult r;
        r.exit_code = exit_invalid;
        r.error = e.what();
        return r;
    }
    return {exit_invalid, "", "unknown command", {}};
}

} // namespace roperc::cli
