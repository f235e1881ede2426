#include "sqss/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sqss/analytics.hpp"
#include "sqss/rng.hpp"

namespace sqss::cli {

using nlohmann::json;

namespace {

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string join_row(const std::vector<std::string>& fields, char sep) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += sep;
        line += fields[i];
    }
    line += '\n';
    return line;
}

char resolve_sep(const ExperimentSpec& spec) {
    const std::string f = spec.format.value_or("csv");
    if (f == "csv") return ',';
    if (f == "tsv") return '\t';
    throw ConfigError("config: \"format\" must be \"csv\" or \"tsv\"");
}

int resolve_threads(const ExperimentSpec& spec) {
    const int threads = spec.threads.value_or(1);
    if (threads < 1 || threads > 256) {
        throw ConfigError("config: \"threads\" must lie in [1, 256]");
    }
    return threads;
}

ChannelKind resolve_named_channel(const std::string& name, double param) {
    try {
        return channel_kind_from_name(name, param);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ChannelKind resolve_channel(const ExperimentSpec& spec) {
    if (spec.p && spec.gamma) {
        throw ConfigError("config: give either \"p\" or \"gamma\", not both");
    }
    const double param = spec.gamma ? *spec.gamma : spec.p.value_or(0.0);
    return resolve_named_channel(spec.channel.value_or("noiseless"), param);
}

std::string channel_column(const ProtocolConfig& cfg) {
    for (const ChannelKind& k : cfg.links) {
        if (k.family() != cfg.links[0].family()) return "mixed";
    }
    return std::string(cfg.links[0].name());
}

std::string param_column(const ProtocolConfig& cfg) {
    bool uniform = true;
    for (const ChannelKind& k : cfg.links) uniform &= k == cfg.links[0];
    if (uniform) return fmt_num(cfg.links[0].param());
    std::string digest;
    for (std::size_t i = 0; i < cfg.links.size(); ++i) {
        if (i > 0) digest += ';';
        digest += fmt_num(cfg.links[i].param());
    }
    return digest;
}

// Agreement flag against the closed form: 3 sigma of the binomial with the
// analytic rate as the null. Empty when there is nothing to compare with.
std::string within_3sigma_flag(const ErrorEstimate& est) {
    if (!est.analytic_rate || est.n_valid == 0) return "";
    const double a = *est.analytic_rate;
    const double band = 3.0 * std::sqrt(a * (1.0 - a) / static_cast<double>(est.n_valid));
    return std::fabs(est.empirical_rate - a) <= band ? "1" : "0";
}

std::vector<std::string> simulate_columns(const ProtocolConfig& cfg, const ErrorEstimate& est) {
    return {std::to_string(cfg.n_rounds),
            std::to_string(est.n_valid),
            std::to_string(est.n_errors),
            fmt_num(est.empirical_rate),
            fmt_num(est.ci_half_width),
            est.analytic_rate ? fmt_num(*est.analytic_rate) : "",
            within_3sigma_flag(est)};
}

constexpr std::array<const char*, 4> kPhaseLabels{"0", "pi/2", "pi", "3pi/2"};

// ---- config parsing ------------------------------------------------------

std::string expect_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config: \"" + key + "\" must be a string");
    return v.get<std::string>();
}

bool expect_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError("config: \"" + key + "\" must be a boolean");
    return v.get<bool>();
}

double expect_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config: \"" + key + "\" must be a number");
    return v.get<double>();
}

double expect_prob(const json& v, const std::string& key) {
    const double x = expect_number(v, key);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ConfigError("config: \"" + key + "\" must lie in [0, 1]");
    }
    return x;
}

double expect_delta(const json& v, const std::string& key) {
    const double x = expect_number(v, key);
    if (!(x > 0.0 && x <= 1.0)) {
        throw ConfigError("config: \"" + key + "\" must lie in (0, 1]");
    }
    return x;
}

std::int64_t expect_int_at_least(const json& v, const std::string& key, std::int64_t lo) {
    if (!v.is_number_integer()) throw ConfigError("config: \"" + key + "\" must be an integer");
    const std::int64_t x = v.get<std::int64_t>();
    if (x < lo) {
        throw ConfigError("config: \"" + key + "\" must be >= " + std::to_string(lo));
    }
    return x;
}

std::uint64_t expect_seed(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError("config: \"" + key + "\" must be a non-negative integer");
}

std::vector<LinkSpec> parse_links(const json& v) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError("config: \"links\" must be a non-empty array");
    }
    std::vector<LinkSpec> links;
    for (const json& item : v) {
        if (!item.is_object()) {
            throw ConfigError("config: \"links\" entries must be objects");
        }
        LinkSpec link;
        bool have_channel = false;
        bool have_param = false;
        for (const auto& [key, value] : item.items()) {
            if (key == "channel") {
                link.channel = expect_string(value, "links.channel");
                have_channel = true;
            } else if (key == "p") {
                if (have_param) throw ConfigError("config: link has both \"p\" and \"gamma\"");
                link.param = expect_prob(value, "links.p");
                have_param = true;
            } else if (key == "gamma") {
                if (have_param) throw ConfigError("config: link has both \"p\" and \"gamma\"");
                link.param = expect_prob(value, "links.gamma");
                have_param = true;
            } else {
                throw ConfigError("config: unknown key \"" + key + "\" in \"links\" entry");
            }
        }
        if (!have_channel) throw ConfigError("config: every \"links\" entry needs a \"channel\"");
        links.push_back(std::move(link));
    }
    return links;
}

}  // namespace

Mode mode_from_name(std::string_view name) {
    if (name == "simulate") return Mode::simulate;
    if (name == "analytic") return Mode::analytic;
    if (name == "sweep") return Mode::sweep;
    if (name == "table1") return Mode::table1;
    if (name == "bound") return Mode::bound;
    if (name == "oracle-check") return Mode::oracle_check;
    throw ConfigError("config: unknown mode \"" + std::string(name) +
                      "\" (expected simulate, analytic, sweep, table1, bound or oracle-check)");
}

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::simulate: return "simulate";
        case Mode::analytic: return "analytic";
        case Mode::sweep: return "sweep";
        case Mode::table1: return "table1";
        case Mode::bound: return "bound";
        case Mode::oracle_check: return "oracle-check";
    }
    return "?";
}

ExperimentSpec parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");

    ExperimentSpec spec;
    bool mode_set = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode") {
            spec.mode = mode_from_name(expect_string(value, key));
            mode_set = true;
        } else if (key == "players") {
            spec.players = static_cast<int>(expect_int_at_least(value, key, 2));
        } else if (key == "channel") {
            const std::string name = expect_string(value, key);
            resolve_named_channel(name, 0.0);  // name check; param validated later
            spec.channel = name;
        } else if (key == "p") {
            spec.p = expect_prob(value, key);
        } else if (key == "gamma") {
            spec.gamma = expect_prob(value, key);
        } else if (key == "links") {
            spec.links = parse_links(value);
        } else if (key == "eps_mean") {
            spec.eps_mean = expect_number(value, key);
        } else if (key == "eps_sigma") {
            spec.eps_sigma = expect_number(value, key);
        } else if (key == "rounds") {
            spec.rounds = expect_int_at_least(value, key, 1);
        } else if (key == "seed") {
            spec.seed = expect_seed(value, key);
        } else if (key == "threads") {
            spec.threads = static_cast<int>(expect_int_at_least(value, key, 1));
        } else if (key == "players_values") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config: \"players_values\" must be a non-empty array");
            }
            for (const json& item : value) {
                spec.players_values.push_back(
                    static_cast<int>(expect_int_at_least(item, "players_values", 2)));
            }
        } else if (key == "p_values") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config: \"p_values\" must be a non-empty array");
            }
            for (const json& item : value) {
                spec.p_values.push_back(expect_prob(item, "p_values"));
            }
        } else if (key == "delta_values") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config: \"delta_values\" must be a non-empty array");
            }
            for (const json& item : value) {
                spec.delta_values.push_back(expect_delta(item, "delta_values"));
            }
        } else if (key == "with_simulation") {
            spec.with_simulation = expect_bool(value, key);
        } else if (key == "max_total_rounds") {
            spec.max_total_rounds = expect_int_at_least(value, key, 1);
        } else if (key == "delta") {
            spec.delta = expect_delta(value, key);
        } else if (key == "max_players") {
            const std::int64_t n = expect_int_at_least(value, key, 2);
            if (n > 8) throw ConfigError("config: \"max_players\" must lie in [2, 8]");
            spec.oracle_max_players = static_cast<int>(n);
        } else if (key == "inject_fault") {
            spec.inject_fault = expect_bool(value, key);
        } else if (key == "out") {
            spec.out_path = expect_string(value, key);
        } else if (key == "format") {
            const std::string f = expect_string(value, key);
            if (f != "csv" && f != "tsv") {
                throw ConfigError("config: \"format\" must be \"csv\" or \"tsv\"");
            }
            spec.format = f;
        } else {
            throw ConfigError("config: unknown key \"" + key + "\"");
        }
    }

    if (mode_set && spec.mode == Mode::sweep) {
        if (!spec.channel) throw ConfigError("config: sweep requires \"channel\"");
        if (spec.p_values.empty() && !spec.p) {
            throw ConfigError("config: sweep requires \"p\" or \"p_values\"");
        }
    }
    return spec;
}

ExperimentSpec load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

ProtocolConfig protocol_config(const ExperimentSpec& spec) {
    ProtocolConfig cfg;
    if (!spec.links.empty()) {
        for (const LinkSpec& link : spec.links) {
            cfg.links.push_back(resolve_named_channel(link.channel, link.param));
        }
        cfg.n_players = spec.players.value_or(static_cast<int>(cfg.links.size()));
        if (cfg.n_players != static_cast<int>(cfg.links.size())) {
            throw ConfigError("config: \"links\" must list exactly one channel per player");
        }
    } else {
        cfg.n_players = spec.players.value_or(3);
        cfg.links.assign(static_cast<std::size_t>(std::max(cfg.n_players, 0)),
                         resolve_channel(spec));
    }
    cfg.gate_error = GateErrorSpec{spec.eps_mean.value_or(0.0), spec.eps_sigma.value_or(0.0)};
    cfg.n_rounds = spec.rounds.value_or(100000);
    cfg.master_seed = spec.seed.value_or(0);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::string cmd_simulate(const ExperimentSpec& spec) {
    const char sep = resolve_sep(spec);
    const ProtocolConfig cfg = protocol_config(spec);
    const ErrorEstimate est = run_experiment(cfg, {}, resolve_threads(spec));

    std::string doc = join_row({"N", "channel", "param", "eps_mean", "rounds", "n_valid",
                                "n_errors", "empirical_rate", "ci_half_width", "analytic_rate",
                                "within_3sigma"},
                               sep);
    std::vector<std::string> row{std::to_string(cfg.n_players), channel_column(cfg),
                                 param_column(cfg), fmt_num(cfg.gate_error.mean_eps)};
    for (std::string& col : simulate_columns(cfg, est)) row.push_back(std::move(col));
    doc += join_row(row, sep);
    return doc;
}

std::string cmd_analytic(const ExperimentSpec& spec) {
    const char sep = resolve_sep(spec);
    ExperimentSpec probe = spec;
    probe.rounds = 1;  // irrelevant to the closed form
    const ProtocolConfig cfg = protocol_config(probe);
    const std::optional<double> rate = closed_form_error_rate(cfg);
    if (!rate) {
        throw ConfigError(
            "config: no closed-form error rate for this configuration "
            "(covered: deterministic gate error, phase-damping/depolarizing links, "
            "homogeneous bit-flip links); use simulate or oracle-check");
    }
    std::string doc = join_row({"N", "channel", "param", "eps_mean", "analytic_rate"}, sep);
    doc += join_row({std::to_string(cfg.n_players), channel_column(cfg), param_column(cfg),
                     fmt_num(cfg.gate_error.mean_eps), fmt_num(*rate)},
                    sep);
    return doc;
}

std::string cmd_sweep(const ExperimentSpec& spec) {
    const char sep = resolve_sep(spec);
    if (!spec.links.empty()) {
        throw ConfigError("config: sweep uses \"channel\" + \"p_values\", not per-link overrides");
    }
    if (!spec.channel) throw ConfigError("config: sweep requires \"channel\"");
    const std::string& channel_name = *spec.channel;
    if (channel_name == "noiseless") {
        throw ConfigError("config: sweep requires a noisy channel");
    }

    std::vector<int> players_axis = spec.players_values;
    if (players_axis.empty()) players_axis = {spec.players.value_or(3)};
    std::vector<double> p_axis = spec.p_values;
    if (p_axis.empty()) {
        if (!spec.p) throw ConfigError("config: sweep requires \"p\" or \"p_values\"");
        p_axis = {*spec.p};
    }
    std::vector<double> deltas = spec.delta_values;
    if (deltas.empty()) deltas = {spec.delta.value_or(0.05)};

    const bool with_sim = spec.with_simulation.value_or(false);
    const std::int64_t rounds = spec.rounds.value_or(100000);
    if (with_sim) {
        const std::int64_t cells =
            static_cast<std::int64_t>(players_axis.size() * p_axis.size());
        const std::int64_t budget = spec.max_total_rounds.value_or(200000000);
        if (cells * rounds > budget) {
            throw ConfigError("config: sweep grid of " + std::to_string(cells) + " cells x " +
                              std::to_string(rounds) + " rounds exceeds max_total_rounds=" +
                              std::to_string(budget));
        }
    }
    const GateErrorSpec gate{spec.eps_mean.value_or(0.0), spec.eps_sigma.value_or(0.0)};
    const std::uint64_t base_seed = spec.seed.value_or(0);

    std::vector<std::string> header{"N", "channel", "param", "eps_mean", "analytic_rate"};
    for (double d : deltas) header.push_back("noise_bound_d" + fmt_num(d));
    if (with_sim) {
        for (const char* col : {"rounds", "n_valid", "n_errors", "empirical_rate",
                                "ci_half_width", "within_3sigma"}) {
            header.push_back(col);
        }
    }
    std::string doc = join_row(header, sep);

    std::uint64_t cell_index = 0;
    for (int n : players_axis) {
        for (double p : p_axis) {
            const ChannelKind kind = resolve_named_channel(channel_name, p);
            ProtocolConfig cfg;
            try {
                cfg = ProtocolConfig::uniform_links(n, kind, rounds, base_seed + cell_index, gate);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            const std::optional<double> rate = closed_form_error_rate(cfg);

            std::vector<std::string> row{std::to_string(n), std::string(kind.name()), fmt_num(p),
                                         fmt_num(gate.mean_eps),
                                         rate ? fmt_num(*rate) : std::string{}};
            for (double d : deltas) row.push_back(fmt_num(noise_bound(n, d)));
            if (with_sim) {
                const ErrorEstimate est = run_experiment(cfg, {}, resolve_threads(spec));
                row.push_back(std::to_string(cfg.n_rounds));
                row.push_back(std::to_string(est.n_valid));
                row.push_back(std::to_string(est.n_errors));
                row.push_back(fmt_num(est.empirical_rate));
                row.push_back(fmt_num(est.ci_half_width));
                row.push_back(within_3sigma_flag(est));
            }
            doc += join_row(row, sep);
            ++cell_index;
        }
    }
    return doc;
}

std::string cmd_table1(const ExperimentSpec& spec) {
    const char sep = resolve_sep(spec);
    const double p = spec.p.value_or(0.0);
    const auto rows = table1(p);

    std::string doc = join_row({"phi1", "phi2", "a", "p_plus", "p_minus", "p_error"}, sep);
    for (const Table1Row& row : rows) {
        doc += join_row({kPhaseLabels[static_cast<std::size_t>(row.q1)],
                         kPhaseLabels[static_cast<std::size_t>(row.q2)], fmt_num(row.coherence),
                         fmt_num(row.p_plus), fmt_num(row.p_minus), fmt_num(row.p_error)},
                        sep);
    }
    return doc;
}

std::string table1_pretty(const ExperimentSpec& spec) {
    const double p = spec.p.value_or(0.0);
    const auto rows = table1(p);
    std::string text = "bit-flip final states, N = 2, p = " + fmt_num(p) + "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-8s%-8s%-16s%-16s%-16s%-16s\n", "phi1", "phi2", "a",
                  "P(+)", "P(-)", "P_error");
    text += line;
    for (const Table1Row& row : rows) {
        std::snprintf(line, sizeof line, "%-8s%-8s%-16s%-16s%-16s%-16s\n",
                      kPhaseLabels[static_cast<std::size_t>(row.q1)],
                      kPhaseLabels[static_cast<std::size_t>(row.q2)],
                      fmt_num(row.coherence).c_str(), fmt_num(row.p_plus).c_str(),
                      fmt_num(row.p_minus).c_str(), fmt_num(row.p_error).c_str());
        text += line;
    }
    return text;
}

std::string cmd_bound(const ExperimentSpec& spec) {
    const char sep = resolve_sep(spec);
    std::vector<int> players_axis = spec.players_values;
    if (players_axis.empty()) players_axis = {spec.players.value_or(3)};
    std::vector<double> deltas = spec.delta_values;
    if (deltas.empty()) deltas = {spec.delta.value_or(0.05)};

    std::string doc = join_row({"N", "delta", "noise_bound", "noise_bound_approx",
                                "gate_error_bound", "gate_error_bound_approx"},
                               sep);
    for (int n : players_axis) {
        for (double d : deltas) {
            doc += join_row({std::to_string(n), fmt_num(d), fmt_num(noise_bound(n, d)),
                             fmt_num(noise_bound_approx(n, d)), fmt_num(gate_error_bound(n, d)),
                             fmt_num(gate_error_bound_approx(n, d))},
                            sep);
        }
    }
    return doc;
}

// ---- oracle-check battery -------------------------------------------------

namespace {

struct CheckResult {
    std::string name;
    double max_dev = 0.0;
    double tol = 0.0;
    std::int64_t cases = 0;

    bool ok() const { return max_dev <= tol; }
};

Mat2 random_density(RoundRng& rng) {
    Mat2 g;
    for (int i = 0; i < 4; ++i) g.e[i] = cplx(rng.next_gaussian(), rng.next_gaussian());
    const Mat2 gram = g * g.dagger();
    const double tr = gram.trace().real();
    if (tr <= 1e-12) return Mat2::from_rows(0.5, 0, 0, 0.5);
    return cplx(1.0 / tr, 0.0) * gram;
}

ChannelKind random_channel(RoundRng& rng) {
    const double p = rng.next_unit();
    switch (rng.next_u64() % 6) {
        case 0: return ChannelKind::noiseless();
        case 1: return ChannelKind::phase_damping(p);
        case 2: return ChannelKind::depolarizing(p);
        case 3: return ChannelKind::bit_flip(p);
        case 4: return ChannelKind::phase_flip(p);
        default: return ChannelKind::amplitude_damping(p);
    }
}

// Final vectorized state of one transcript with the same superop after every
// gate.
VecState transcript_state(std::span<const int> turns, const Superop& link) {
    VecState v = vectorize(DensityMatrix::plus_state().mat());
    for (int q : turns) v = link * (phase_gate_superop(q) * v);
    return v;
}

constexpr std::array<double, 5> kOracleNoiseGrid{0.0, 0.01, 0.05, 0.1, 0.3};

}  // namespace

OracleReport cmd_oracle_check(const ExperimentSpec& spec) {
    const int max_n = spec.oracle_max_players.value_or(6);
    if (max_n < 2 || max_n > 8) {
        throw ConfigError("config: \"max_players\" must lie in [2, 8]");
    }
    const int small_n = std::min(max_n, 6);

    std::vector<CheckResult> checks;
    std::ostringstream side_by_side;

    {  // Kraus completeness across the channel zoo.
        CheckResult c{"channel-completeness", 0.0, 1e-12, 0};
        const std::array<ChannelKind (*)(double), 5> factories{
            ChannelKind::phase_damping, ChannelKind::depolarizing, ChannelKind::bit_flip,
            ChannelKind::phase_flip, ChannelKind::amplitude_damping};
        bool faulted = false;
        for (auto factory : factories) {
            for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
                KrausChannel ch = make_channel(factory(p));
                if (spec.inject_fault && !faulted) {
                    ch.ops[0] = cplx(1.0005, 0.0) * ch.ops[0];
                    faulted = true;
                }
                c.max_dev = std::max(c.max_dev, ch.completeness_defect());
                ++c.cases;
            }
        }
        checks.push_back(c);
    }

    {  // Kraus application vs superoperator action, plus output validity.
        CheckResult equiv{"kraus-superop-equivalence", 0.0, 1e-12, 0};
        CheckResult validity{"output-state-validity", 0.0, 1e-12, 0};
        RoundRng rng = RoundRng::child(0xC0FFEEull, 1);
        for (int i = 0; i < 1000; ++i) {
            const KrausChannel ch = make_channel(random_channel(rng));
            const Mat2 rho = random_density(rng);
            const DensityMatrix out = apply_kraus(ch, DensityMatrix(rho));
            const VecState via_kraus = vectorize(out.mat());
            const VecState via_superop = to_superop(ch) * vectorize(rho);
            equiv.max_dev = std::max(equiv.max_dev, max_abs_diff(via_kraus, via_superop));
            ++equiv.cases;

            const Mat2& o = out.mat();
            double defect = std::abs(o.trace() - 1.0);
            defect = std::max(defect, max_abs_diff(o, o.dagger()));
            defect = std::max(defect, std::max(0.0, -min_eigenvalue(o)));
            validity.max_dev = std::max(validity.max_dev, defect);
            ++validity.cases;
        }
        checks.push_back(equiv);
        checks.push_back(validity);
    }

    {  // Exhaustive oracle vs the closed forms.
        CheckResult deph{"dephasing-closed-form", 0.0, 1e-10, 0};
        CheckResult depol{"depolarizing-closed-form", 0.0, 1e-10, 0};
        CheckResult bflip{"bitflip-closed-form", 0.0, 1e-10, 0};
        CheckResult pflip{"phase-flip-conjecture", 0.0, 1e-10, 0};
        for (int n = 2; n <= max_n; ++n) {
            for (double p : kOracleNoiseGrid) {
                deph.max_dev =
                    std::max(deph.max_dev,
                             std::fabs(exhaustive_error_prob(n, ChannelKind::phase_damping(p)) -
                                       dephasing_error_prob(n, p)));
                ++deph.cases;
                depol.max_dev =
                    std::max(depol.max_dev,
                             std::fabs(exhaustive_error_prob(n, ChannelKind::depolarizing(p)) -
                                       dephasing_error_prob(n, p)));
                ++depol.cases;
                bflip.max_dev =
                    std::max(bflip.max_dev,
                             std::fabs(exhaustive_error_prob(n, ChannelKind::bit_flip(p)) -
                                       bitflip_error_prob(n, p)));
                ++bflip.cases;
                const double oracle = exhaustive_error_prob(n, ChannelKind::phase_flip(p));
                const double conjecture = phase_flip_error_prob(n, p);
                pflip.max_dev = std::max(pflip.max_dev, std::fabs(oracle - conjecture));
                ++pflip.cases;
                if (p == 0.05 || p == 0.3) {
                    char line[128];
                    std::snprintf(line, sizeof line,
                                  "  phase-flip N=%d p=%s: oracle=%s conjecture=%s\n", n,
                                  fmt_num(p).c_str(), fmt_num(oracle).c_str(),
                                  fmt_num(conjecture).c_str());
                    side_by_side << line;
                }
            }
        }
        checks.push_back(deph);
        checks.push_back(depol);
        checks.push_back(bflip);
        checks.push_back(pflip);
    }

    {  // Heterogeneous dephasing product formula.
        CheckResult c{"hetero-dephasing-product", 0.0, 1e-10, 0};
        RoundRng rng = RoundRng::child(0xC0FFEEull, 2);
        for (int i = 0; i < 20; ++i) {
            const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(
                                                                    small_n - 1));
            std::vector<double> ps(static_cast<std::size_t>(n));
            std::vector<ChannelKind> links;
            links.reserve(ps.size());
            for (double& p : ps) {
                p = rng.next_unit();
                links.push_back(ChannelKind::phase_damping(p));
            }
            c.max_dev = std::max(c.max_dev, std::fabs(exhaustive_error_prob(n, links) -
                                                      dephasing_error_prob_hetero(ps)));
            ++c.cases;
        }
        checks.push_back(c);
    }

    {  // Depolarizing and dephasing leave identical final states per transcript.
        CheckResult c{"depolarizing-dephasing-state-identity", 0.0, 1e-12, 0};
        for (int n = 2; n <= small_n; ++n) {
            for (double p : {0.05, 0.3}) {
                const Superop deph = to_superop(make_channel(ChannelKind::phase_damping(p)));
                const Superop depol = to_superop(make_channel(ChannelKind::depolarizing(p)));
                std::vector<int> turns(static_cast<std::size_t>(n));
                const std::int64_t total = std::int64_t{1} << (2 * n);
                for (std::int64_t code = 0; code < total; ++code) {
                    std::int64_t rest = code;
                    for (int m = 0; m < n; ++m) {
                        turns[static_cast<std::size_t>(m)] = static_cast<int>(rest & 3);
                        rest >>= 2;
                    }
                    c.max_dev = std::max(c.max_dev, max_abs_diff(transcript_state(turns, deph),
                                                                 transcript_state(turns, depol)));
                    ++c.cases;
                }
            }
        }
        checks.push_back(c);
    }

    {  // Bit-flip conditional probabilities and block reassembly vs the engine.
        CheckResult cond{"bitflip-conditional-formula", 0.0, 1e-10, 0};
        CheckResult blocks{"bitflip-block-reassembly", 0.0, 1e-12, 0};
        for (int n = 2; n <= small_n; ++n) {
            for (double p : {0.1, 0.37}) {
                const Superop link = to_superop(make_channel(ChannelKind::bit_flip(p)));
                std::vector<int> turns(static_cast<std::size_t>(n));
                const std::int64_t total = std::int64_t{1} << (2 * n);
                for (std::int64_t code = 0; code < total; ++code) {
                    std::int64_t rest = code;
                    int class_sum = 0;
                    for (int m = 0; m < n; ++m) {
                        turns[static_cast<std::size_t>(m)] = static_cast<int>(rest & 3);
                        class_sum += static_cast<int>(rest & 1);
                        rest >>= 2;
                    }
                    if (class_sum % 2 != 0) continue;
                    const VecState v = transcript_state(turns, link);
                    const double engine_plus = 0.5 * (v[0] + v[1] + v[2] + v[3]).real();
                    const auto transcript = BitflipTranscript::from_quarter_turns(turns);
                    cond.max_dev =
                        std::max(cond.max_dev, std::fabs(bitflip_conditional_plus(transcript, p) -
                                                         engine_plus));
                    ++cond.cases;

                    const BitflipBlockProduct blk = bitflip_block_product(transcript, p);
                    double dev = std::fabs(blk.a_n - 2.0 * v[1].real());
                    dev = std::max(dev, std::abs(v[1] - std::conj(v[2])));
                    dev = std::max(dev, std::abs(v[0] - 0.5));
                    dev = std::max(dev, std::abs(v[3] - 0.5));
                    blocks.max_dev = std::max(blocks.max_dev, dev);
                    ++blocks.cases;
                }
            }
        }
        checks.push_back(cond);
        checks.push_back(blocks);
    }

    {  // Amplitude damping has no closed form here; report the oracle values.
        for (int n : {2, 4}) {
            if (n > max_n) continue;
            for (double gamma : {0.1, 0.3}) {
                char line[128];
                std::snprintf(line, sizeof line, "  amplitude-damping N=%d gamma=%s: oracle=%s\n",
                              n, fmt_num(gamma).c_str(),
                              fmt_num(exhaustive_error_prob(
                                          n, ChannelKind::amplitude_damping(gamma)))
                                  .c_str());
                side_by_side << line;
            }
        }
    }

    OracleReport report;
    report.ok = true;
    std::ostringstream out;
    out << "oracle-check battery (max players " << max_n << ")\n";
    int failures = 0;
    for (const CheckResult& c : checks) {
        report.ok &= c.ok();
        failures += c.ok() ? 0 : 1;
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %-38s max_dev=%.3e tol=%.0e cases=%lld\n",
                      c.ok() ? "ok" : "FAIL", c.name.c_str(), c.max_dev, c.tol,
                      static_cast<long long>(c.cases));
        out << line;
    }
    out << "oracle values without an asserted closed form:\n" << side_by_side.str();
    if (report.ok) {
        out << "result: PASS (" << checks.size() << " checks)\n";
    } else {
        out << "result: FAIL (" << failures << " of " << checks.size()
            << " checks exceeded tolerance)\n";
    }
    report.text = out.str();
    return report;
}

int run(const ExperimentSpec& spec, std::ostream& console, std::ostream& diag) {
    std::string doc;
    std::string pretty;
    bool oracle_ok = true;
    try {
        switch (spec.mode) {
            case Mode::simulate: doc = cmd_simulate(spec); break;
            case Mode::analytic: doc = cmd_analytic(spec); break;
            case Mode::sweep: doc = cmd_sweep(spec); break;
            case Mode::table1:
                doc = cmd_table1(spec);
                pretty = table1_pretty(spec);
                break;
            case Mode::bound: doc = cmd_bound(spec); break;
            case Mode::oracle_check: {
                const OracleReport report = cmd_oracle_check(spec);
                doc = report.text;
                oracle_ok = report.ok;
                break;
            }
        }
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        diag << "config error: " << e.what() << '\n';
        return 2;
    }

    if (spec.out_path && !spec.out_path->empty()) {
        std::ofstream f(*spec.out_path, std::ios::binary);
        if (!f) {
            diag << "i/o error: cannot open \"" << *spec.out_path << "\"\n";
            return 4;
        }
        f << doc;
        f.flush();
        if (!f.good()) {
            diag << "i/o error: short write to \"" << *spec.out_path << "\"\n";
            return 4;
        }
        if (!pretty.empty()) console << pretty;
    } else {
        console << doc;
        if (!pretty.empty()) diag << pretty;
    }
    return oracle_ok ? 0 : 3;
}

}  // namespace sqss::cli
