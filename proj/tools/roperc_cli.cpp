#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "roperc/commands.hpp"

using namespace roperc;
using namespace roperc::cli;

namespace {

struct Flags {
    std::string graph;
    std::vector<VertexId> sources;
    unsigned n = 0;
    double p = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string format = "json";
    std::string out;
    bool no_timestamp = false;
    std::vector<VertexId> window;
    std::string arithmetic = "auto";
    std::size_t edge_cap = 0;
    unsigned max_height = 0;
    std::string csv_prefix;
    bool synthetic = false;
    double lambda = 0.0;
};

struct Options {
    CLI::Option* graph = nullptr;
    CLI::Option* sources = nullptr;
    CLI::Option* n = nullptr;
    CLI::Option* p = nullptr;
    CLI::Option* samples = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* window = nullptr;
    CLI::Option* arithmetic = nullptr;
    CLI::Option* edge_cap = nullptr;
    CLI::Option* max_height = nullptr;
    CLI::Option* csv_prefix = nullptr;
    CLI::Option* lambda = nullptr;
};

// Every subcommand gets the full flag set; validate() rejects the ones a command
// does not use, with a message naming the flag.
Options add_flags(CLI::App* sub, Flags& f) {
    Options o;
    o.graph = sub->add_option("--graph", f.graph, "graph file (vertices N / edge u v [p])");
    o.sources = sub->add_option("--sources", f.sources, "source vertex ids")->delimiter(',');
    o.n = sub->add_option("-n", f.n, "tree height");
    o.p = sub->add_option("-p", f.p, "probability an edge points toward the root");
    o.samples = sub->add_option("--samples", f.samples, "Monte Carlo sample count");
    o.seed = sub->add_option("--seed", f.seed, "64-bit seed (default 0)");
    o.threads = sub->add_option("--threads", f.threads, "worker threads (default: available parallelism)");
    sub->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", f.out, "write output to this file instead of stdout");
    sub->add_flag("--no-timestamp", f.no_timestamp, "omit the timestamp field");
    o.window = sub->add_option("--window", f.window, "up to 5 vertices for the association check")->delimiter(',');
    o.arithmetic = sub->add_option("--arithmetic", f.arithmetic, "auto, exact or double")
                       ->check(CLI::IsMember({"auto", "exact", "double"}));
    o.edge_cap = sub->add_option("--edge-cap", f.edge_cap, "maximum edges for exact enumeration (default 24)");
    o.max_height = sub->add_option("--max-height", f.max_height, "tree height cap (default 26)");
    o.csv_prefix = sub->add_option("--csv-prefix", f.csv_prefix, "also write PREFIX_histogram.csv and PREFIX_max_level.csv");
    sub->add_flag("--synthetic", f.synthetic, "diagnose Poisson-generated data instead of the tree");
    o.lambda = sub->add_option("--lambda", f.lambda, "Poisson mean for --synthetic");
    return o;
}

template <class T>
std::optional<T> if_given(CLI::Option* opt, const T& value) {
    return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Percolation on randomly oriented graphs: exact checks, tree analytics, simulation"};
    app.require_subcommand(1);
    Flags f;
    const std::map<std::string, Command> names{{"check", Command::check},
                                               {"tree-analytic", Command::tree_analytic},
                                               {"tree-simulate", Command::tree_simulate},
                                               {"graph-simulate", Command::graph_simulate},
                                               {"poisson", Command::poisson}};
    const std::map<std::string, std::string> help{
        {"check", "exact joint law and positive-association checks on a graph file"},
        {"tree-analytic", "closed-form rho/alpha/pi table and expectations for T_n"},
        {"tree-simulate", "Monte Carlo cluster statistics on T_n"},
        {"graph-simulate", "Monte Carlo wet frequencies on a graph file"},
        {"poisson", "Stein-Chen bound and empirical TV distance to Poisson"}};
    std::map<std::string, std::pair<CLI::App*, Options>> subs;
    for (const auto& [name, cmd] : names) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        subs[name] = {sub, add_flags(sub, f)};
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }

    RunConfig c;
    for (const auto& [name, entry] : subs) {
        if (!entry.first->parsed()) continue;
        const Options& o = entry.second;
        c.command = names.at(name);
        c.graph_path = if_given(o.graph, f.graph);
        c.sources = f.sources;
        c.n = if_given(o.n, f.n);
        c.p = if_given(o.p, f.p);
        c.samples = if_given(o.samples, f.samples);
        c.seed = if_given(o.seed, f.seed);
        c.threads = if_given(o.threads, f.threads);
        c.window = f.window;
        c.edge_cap = if_given(o.edge_cap, f.edge_cap);
        c.max_height = if_given(o.max_height, f.max_height);
        c.csv_prefix = if_given(o.csv_prefix, f.csv_prefix);
        c.lambda = if_given(o.lambda, f.lambda);
    }
    c.format = f.format == "csv" ? Format::csv : Format::json;
    c.timestamp = !f.no_timestamp;
    c.synthetic = f.synthetic;
    c.arithmetic = f.arithmetic == "exact" ? Arithmetic::exact
                   : f.arithmetic == "double" ? Arithmetic::floating
                                              : Arithmetic::automatic;
    if (!f.out.empty()) c.output_path = f.out;

    const CommandResult r = run_command(c);
    if (!r.error.empty()) std::cerr << "error: " << r.error << '\n';
    if (!r.output.empty()) {
        if (c.output_path) {
            std::ofstream file(*c.output_path);
            if (!file) {
                std::cerr << "error: cannot write '" << *c.output_path << "'\n";
                return exit_invalid;
            }
            file << r.output;
        } else {
            std::cout << r.output;
        }
    }
    for (const auto& [path, content] : r.extra_files) {
        std::ofstream file(path);
        if (!file) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return exit_invalid;
        }
        file << content;
    }
    return r.exit_code;
}
