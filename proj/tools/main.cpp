#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sqss/cli.hpp"

namespace {

using sqss::cli::ExperimentSpec;
using sqss::cli::Mode;

// Flags shared by all subcommands; anything given on the command line
// overrides the same setting from --config.
struct FlagValues {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> rounds;
    std::optional<int> players;
    std::optional<std::string> channel;
    std::optional<double> p;
    std::optional<double> gamma;
    std::optional<double> eps_mean;
    std::optional<double> eps_sigma;
    std::optional<double> delta;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> threads;
    std::optional<int> max_players;
    std::optional<bool> with_simulation;
    bool inject_fault = false;
};

void add_common_flags(CLI::App* sub, FlagValues& flags) {
    sub->add_option("--config", flags.config_path, "JSON experiment config (see README)");
    sub->add_option("--seed", flags.seed, "master RNG seed");
    sub->add_option("--rounds", flags.rounds, "number of protocol rounds");
    sub->add_option("--players", flags.players, "number of players N");
    sub->add_option("--channel", flags.channel,
                    "link channel: noiseless|phase-damping|depolarizing|bit-flip|"
                    "phase-flip|amplitude-damping");
    sub->add_option("--p", flags.p, "channel parameter p in [0,1]");
    sub->add_option("--gamma", flags.gamma, "amplitude damping parameter in [0,1]");
    sub->add_option("--eps-mean", flags.eps_mean, "mean gate phase error (radians)");
    sub->add_option("--eps-sigma", flags.eps_sigma, "gate phase jitter std dev (radians)");
    sub->add_option("--delta", flags.delta, "tolerance budget (error rate target delta/2)");
    sub->add_option("--out", flags.out, "output path (default: stdout)");
    sub->add_option("--format", flags.format, "csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
    sub->add_option("--threads", flags.threads, "worker threads (output is identical)");
}

ExperimentSpec merge(Mode mode, const FlagValues& flags) {
    ExperimentSpec spec;
    if (flags.config_path) {
        spec = sqss::cli::load_config_file(*flags.config_path);
    }
    spec.mode = mode;
    if (flags.seed) spec.seed = flags.seed;
    if (flags.rounds) spec.rounds = flags.rounds;
    if (flags.players) spec.players = flags.players;
    if (flags.channel) {
        spec.channel = flags.channel;
        spec.links.clear();
    }
    if (flags.p) spec.p = flags.p;
    if (flags.gamma) spec.gamma = flags.gamma;
    if (flags.eps_mean) spec.eps_mean = flags.eps_mean;
    if (flags.eps_sigma) spec.eps_sigma = flags.eps_sigma;
    if (flags.delta) spec.delta = flags.delta;
    if (flags.out) spec.out_path = flags.out;
    if (flags.format) spec.format = flags.format;
    if (flags.threads) spec.threads = flags.threads;
    if (flags.max_players) spec.oracle_max_players = flags.max_players;
    if (flags.with_simulation) spec.with_simulation = flags.with_simulation;
    if (flags.inject_fault) spec.inject_fault = true;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential quantum secret sharing simulation lab"};
    app.require_subcommand(1);

    FlagValues flags;
    struct SubEntry {
        Mode mode;
        CLI::App* sub;
    };
    std::vector<SubEntry> subs;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error-rate estimate");
    auto* analytic = app.add_subcommand("analytic", "closed-form error rate only");
    auto* sweep = app.add_subcommand("sweep", "grid of (N, p) cells with bound columns");
    auto* table1 = app.add_subcommand("table1", "two-player bit-flip final-state table");
    auto* bound = app.add_subcommand("bound", "admissible noise and gate-error bounds");
    auto* oracle = app.add_subcommand("oracle-check", "exhaustive-oracle invariants battery");
    subs = {{Mode::simulate, simulate}, {Mode::analytic, analytic}, {Mode::sweep, sweep},
            {Mode::table1, table1},     {Mode::bound, bound},       {Mode::oracle_check, oracle}};
    for (auto& entry : subs) add_common_flags(entry.sub, flags);
    oracle->add_option("--max-players", flags.max_players,
                       "largest N the exhaustive battery enumerates (2..8)");
    oracle->add_flag("--inject-fault", flags.inject_fault,
                     "corrupt one channel to exercise the failure path");
    sweep->add_option("--with-simulation", flags.with_simulation,
                      "also run Monte Carlo in each sweep cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (const auto& entry : subs) {
        if (entry.sub->parsed()) {
            try {
                return sqss::cli::run(merge(entry.mode, flags), std::cout, std::cerr);
            } catch (const sqss::cli::ConfigError& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return 2;
            }
        }
    }
    return 2;
}
