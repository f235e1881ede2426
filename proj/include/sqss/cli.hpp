#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqss/protocol.hpp"

namespace sqss::cli {

enum class Mode { simulate, analytic, sweep, table1, bound, oracle_check };

Mode mode_from_name(std::string_view name);
std::string_view mode_name(Mode mode);

struct LinkSpec {
    std::string channel;
    double param = 0.0;
};

/// One experiment description. Fields left unset fall back to documented
/// defaults at command time, so command-line flags can override any config
/// value by simply assigning it.
struct ExperimentSpec {
    Mode mode = Mode::simulate;

    std::optional<int> players;
    std::optional<std::string> channel;
    std::optional<double> p;
    std::optional<double> gamma;
    std::vector<LinkSpec> links;  // per-link override; empty = homogeneous
    std::optional<double> eps_mean;
    std::optional<double> eps_sigma;
    std::optional<std::int64_t> rounds;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    // sweep axes
    std::vector<int> players_values;
    std::vector<double> p_values;
    std::vector<double> delta_values;
    std::optional<bool> with_simulation;
    std::optional<std::int64_t> max_total_rounds;

    std::optional<double> delta;
    std::optional<int> oracle_max_players;
    bool inject_fault = false;  // test hook: corrupt a channel so checks trip

    std::optional<std::string> out_path;
    std::optional<std::string> format;  // "csv" (default) or "tsv"
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Strict JSON config parser: unknown keys, wrong types and out-of-domain
/// values are ConfigErrors naming the offending field.
ExperimentSpec parse_config(const std::string& json_text);

/// Loads and parses a config file. Unreadable files are ConfigErrors.
ExperimentSpec load_config_file(const std::string& path);

/// The protocol configuration a simulate/analytic/sweep spec resolves to.
ProtocolConfig protocol_config(const ExperimentSpec& spec);

std::string cmd_simulate(const ExperimentSpec& spec);
std::string cmd_analytic(const ExperimentSpec& spec);
std::string cmd_sweep(const ExperimentSpec& spec);
std::string cmd_table1(const ExperimentSpec& spec);
std::string cmd_bound(const ExperimentSpec& spec);

/// Human-oriented rendering of cmd_table1's rows.
std::string table1_pretty(const ExperimentSpec& spec);

struct OracleReport {
    std::string text;
    bool ok = false;
};

/// Runs the invariants battery: exhaustive oracle vs closed forms, Kraus vs
/// superoperator equivalence, depolarizing/dephasing identity, bit-flip
/// conditional formula and block reassembly, plus side-by-side reports for
/// channels without a closed form.
OracleReport cmd_oracle_check(const ExperimentSpec& spec);

/// Dispatches the spec, writing the document to spec.out_path (or `console`
/// when unset) and diagnostics to `diag`. Exit codes: 0 success, 2 config
/// error, 3 oracle-check failure, 4 I/O error.
int run(const ExperimentSpec& spec, std::ostream& console, std::ostream& diag);

}  // namespace sqss::cli
