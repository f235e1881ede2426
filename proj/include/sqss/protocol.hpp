#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sqss/channels.hpp"

namespace sqss {

/// Per-player gate imperfection: player m applies phi_m + eps_m with
/// eps_m = mean_eps + Normal(0, jitter_sigma). Draws must never move a phase
/// into the other class, hence the |mean| + 3*sigma < pi/4 invariant;
/// violating configurations are rejected, not clipped.
struct GateErrorSpec {
    double mean_eps = 0.0;
    double jitter_sigma = 0.0;

    void validate() const;
    bool is_zero() const { return mean_eps == 0.0 && jitter_sigma == 0.0; }
};

struct ProtocolConfig {
    int n_players = 2;
    std::vector<ChannelKind> links;  // link m sits after player m's gate; size == n_players
    GateErrorSpec gate_error;
    std::int64_t n_rounds = 1;
    std::uint64_t master_seed = 0;

    void validate() const;

    /// All links share one channel spec.
    static ProtocolConfig uniform_links(int n_players, const ChannelKind& link,
                                        std::int64_t n_rounds, std::uint64_t master_seed,
                                        const GateErrorSpec& gate_error = {});
};

/// One round's transcript. outcome: 0 for "+", 1 for "-". ideal_outcome is
/// -1 on invalid rounds (class bits summing odd), where the X measurement
/// carries no correlation.
struct RoundRecord {
    std::int64_t round_index = 0;
    std::vector<PlayerAction> actions;
    std::vector<double> eps_draws;
    DensityMatrix final_state;
    bool valid = false;
    int outcome = 0;
    int ideal_outcome = -1;
};

/// Per-player key bits for one valid round; XORs to zero in the noiseless
/// protocol.
struct KeyShares {
    std::vector<int> bits;

    int parity() const;
};

/// Empirical error rate over the valid rounds of one experiment, paired with
/// the closed-form prediction when the configuration has one.
struct ErrorEstimate {
    std::int64_t n_rounds = 0;
    std::int64_t n_valid = 0;
    std::int64_t n_errors = 0;
    double empirical_rate = 0.0;  // n_errors / n_valid; 0 when no valid rounds
    double ci_half_width = 0.0;   // 3 sigma binomial half-width
    std::optional<double> analytic_rate;
};

/// Plays one round: draws the N quarter turns and gate offsets from the
/// round's child RNG stream (order: q_1..q_N, eps_1..eps_N, measurement),
/// evolves vectorize(|+><+|) through gate+link for each player, and samples
/// the dealer's X measurement from Bernoulli(x_plus_prob).
RoundRecord run_round(const ProtocolConfig& cfg, std::int64_t round_index);

/// True iff the class bits sum to zero mod 2.
bool is_valid(const RoundRecord& rec);

/// (sum_m q_m / 2) mod 2, the X outcome dictated by the transcript.
/// Throws std::invalid_argument on invalid rounds.
int ideal_outcome(const RoundRecord& rec);

/// K_1 = s_1 xor m xor (sum p_m / 2 mod 2) with m the measured outcome;
/// K_i = s_i for i >= 2. Throws std::invalid_argument on invalid rounds.
KeyShares extract_key_shares(const RoundRecord& rec);

/// Closed-form error rate when the analytics module has one for this
/// configuration: pure deterministic gate error, links drawn from
/// {noiseless, phase damping, depolarizing}, or homogeneous bit flip.
std::optional<double> closed_form_error_rate(const ProtocolConfig& cfg);

using RoundSink = std::function<void(const RoundRecord&)>;

/// Runs cfg.n_rounds rounds and tallies errors over the valid ones. Records
/// reach the sink in round-index order and the estimate is bit-identical for
/// a fixed master_seed no matter how many threads execute.
ErrorEstimate run_experiment(const ProtocolConfig& cfg, const RoundSink& sink = {},
                             int n_threads = 1);

}  // namespace sqss
