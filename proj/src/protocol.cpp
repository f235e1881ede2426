#include "sqss/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "sqss/analytics.hpp"
#include "sqss/rng.hpp"

namespace sqss {

namespace {

struct RoundEngine {
    const ProtocolConfig& cfg;
    std::vector<Superop> link_superops;

    explicit RoundEngine(const ProtocolConfig& c) : cfg(c) {
        link_superops.reserve(cfg.links.size());
        for (const ChannelKind& kind : cfg.links) {
            link_superops.push_back(to_superop(make_channel(kind)));
        }
    }

    RoundRecord round(std::int64_t index) const {
        const int n = cfg.n_players;
        RoundRng rng = RoundRng::child(cfg.master_seed, static_cast<std::uint64_t>(index));

        std::vector<PlayerAction> actions(n);
        for (int m = 0; m < n; ++m) actions[m].quarter_turn = rng.next_quarter_turn();

        std::vector<double> eps(n, cfg.gate_error.mean_eps);
        if (cfg.gate_error.jitter_sigma > 0.0) {
            for (int m = 0; m < n; ++m) {
                eps[m] = cfg.gate_error.mean_eps + cfg.gate_error.jitter_sigma * rng.next_gaussian();
            }
        }

        VecState v = vectorize(DensityMatrix::plus_state().mat());
        for (int m = 0; m < n; ++m) {
            v = noisy_phase_gate_superop(actions[m].quarter_turn, eps[m]) * v;
            v = link_superops[m] * v;
        }
        DensityMatrix final_state(devectorize(v));

        const double p_plus = x_plus_prob(final_state);
        const int outcome = rng.next_unit() < p_plus ? 0 : 1;

        int class_sum = 0;
        int turn_sum = 0;
        for (const PlayerAction& a : actions) {
            class_sum += a.class_bit();
            turn_sum += a.quarter_turn;
        }
        const bool valid = class_sum % 2 == 0;

        return RoundRecord{
            .round_index = index,
            .actions = std::move(actions),
            .eps_draws = std::move(eps),
            .final_state = final_state,
            .valid = valid,
            .outcome = outcome,
            .ideal_outcome = valid ? (turn_sum / 2) % 2 : -1,
        };
    }
};

}  // namespace

void GateErrorSpec::validate() const {
    if (!std::isfinite(mean_eps) || !std::isfinite(jitter_sigma) || jitter_sigma < 0.0) {
        throw std::invalid_argument("gate error spec: mean_eps must be finite, jitter_sigma >= 0");
    }
    if (std::abs(mean_eps) + 3.0 * jitter_sigma >= std::numbers::pi / 4.0) {
        throw std::invalid_argument(
            "gate error spec: |mean_eps| + 3*jitter_sigma must stay below pi/4 "
            "(phase errors may not change the class)");
    }
}

void ProtocolConfig::validate() const {
    if (n_players < 2) {
        throw std::invalid_argument("protocol config: n_players must be >= 2");
    }
    if (links.size() != static_cast<std::size_t>(n_players)) {
        throw std::invalid_argument("protocol config: need exactly one link per player");
    }
    if (n_rounds < 1) {
        throw std::invalid_argument("protocol config: n_rounds must be >= 1");
    }
    gate_error.validate();
}

ProtocolConfig ProtocolConfig::uniform_links(int n_players, const ChannelKind& link,
                                             std::int64_t n_rounds, std::uint64_t master_seed,
                                             const GateErrorSpec& gate_error) {
    ProtocolConfig cfg;
    cfg.n_players = n_players;
    cfg.links.assign(static_cast<std::size_t>(n_players > 0 ? n_players : 0), link);
    cfg.gate_error = gate_error;
    cfg.n_rounds = n_rounds;
    cfg.master_seed = master_seed;
    cfg.validate();
    return cfg;
}

RoundRecord run_round(const ProtocolConfig& cfg, std::int64_t round_index) {
    cfg.validate();
    return RoundEngine(cfg).round(round_index);
}

bool is_valid(const RoundRecord& rec) {
    int class_sum = 0;
    for (const PlayerAction& a : rec.actions) class_sum += a.class_bit();
    return class_sum % 2 == 0;
}

int ideal_outcome(const RoundRecord& rec) {
    if (!rec.valid) {
        throw std::invalid_argument("ideal_outcome: round is invalid (odd class-bit sum)");
    }
    int turn_sum = 0;
    for (const PlayerAction& a : rec.actions) turn_sum += a.quarter_turn;
    return (turn_sum / 2) % 2;
}

KeyShares extract_key_shares(const RoundRecord& rec) {
    if (!rec.valid) {
        throw std::invalid_argument("extract_key_shares: round is invalid");
    }
    int class_sum = 0;
    for (const PlayerAction& a : rec.actions) class_sum += a.class_bit();

    KeyShares shares;
    shares.bits.reserve(rec.actions.size());
    const int dealer_correction = rec.outcome ^ ((class_sum / 2) % 2);
    for (std::size_t i = 0; i < rec.actions.size(); ++i) {
        const int s = rec.actions[i].secret_bit();
        shares.bits.push_back(i == 0 ? (s ^ dealer_correction) : s);
    }
    return shares;
}

int KeyShares::parity() const {
    int acc = 0;
    for (int b : bits) acc ^= b;
    return acc;
}

std::optional<double> closed_form_error_rate(const ProtocolConfig& cfg) {
    using F = ChannelKind::Family;
    if (cfg.gate_error.jitter_sigma != 0.0) return std::nullopt;

    bool all_noiseless = true;
    bool all_dephasing_like = true;  // noiseless, phase damping or depolarizing
    bool all_bit_flip = true;
    for (const ChannelKind& k : cfg.links) {
        all_noiseless &= k.family() == F::noiseless;
        all_dephasing_like &= k.family() == F::noiseless || k.family() == F::phase_damping ||
                              k.family() == F::depolarizing;
        all_bit_flip &= k.family() == F::bit_flip && k.param() == cfg.links[0].param();
    }

    if (all_noiseless) {
        return gate_error_prob(cfg.n_players, cfg.gate_error.mean_eps);
    }
    if (cfg.gate_error.mean_eps != 0.0) return std::nullopt;
    if (all_dephasing_like) {
        std::vector<double> ps;
        ps.reserve(cfg.links.size());
        for (const ChannelKind& k : cfg.links) ps.push_back(k.param());
        return dephasing_error_prob_hetero(ps);
    }
    if (all_bit_flip) {
        return bitflip_error_prob(cfg.n_players, cfg.links[0].param());
    }
    return std::nullopt;
}

ErrorEstimate run_experiment(const ProtocolConfig& cfg, const RoundSink& sink, int n_threads) {
    cfg.validate();
    if (n_threads < 1) {
        throw std::invalid_argument("run_experiment: n_threads must be >= 1");
    }
    const RoundEngine engine(cfg);

    struct Tally {
        std::int64_t valid = 0;
        std::int64_t errors = 0;

        void absorb(const RoundRecord& rec) {
            if (rec.valid) {
                ++valid;
                errors += rec.outcome != rec.ideal_outcome;
            }
        }
    };

    Tally total;
    if (n_threads == 1 || cfg.n_rounds < 2 * n_threads) {
        for (std::int64_t i = 0; i < cfg.n_rounds; ++i) {
            RoundRecord rec = engine.round(i);
            total.absorb(rec);
            if (sink) sink(rec);
        }
    } else {
        // Contiguous chunks, merged in round-index order. Tallies are sums of
        // integers, so the merge is exact regardless of the partition.
        const std::int64_t chunk = (cfg.n_rounds + n_threads - 1) / n_threads;
        std::vector<Tally> tallies(static_cast<std::size_t>(n_threads));
        std::vector<std::vector<RoundRecord>> buffers(static_cast<std::size_t>(n_threads));
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t] {
                const std::int64_t lo = t * chunk;
                const std::int64_t hi = std::min<std::int64_t>(lo + chunk, cfg.n_rounds);
                for (std::int64_t i = lo; i < hi; ++i) {
                    RoundRecord rec = engine.round(i);
                    tallies[static_cast<std::size_t>(t)].absorb(rec);
                    if (sink) buffers[static_cast<std::size_t>(t)].push_back(std::move(rec));
                }
            });
        }
        for (std::thread& w : workers) w.join();
        for (int t = 0; t < n_threads; ++t) {
            total.valid += tallies[static_cast<std::size_t>(t)].valid;
            total.errors += tallies[static_cast<std::size_t>(t)].errors;
            if (sink) {
                for (const RoundRecord& rec : buffers[static_cast<std::size_t>(t)]) sink(rec);
            }
        }
    }

    ErrorEstimate est;
    est.n_rounds = cfg.n_rounds;
    est.n_valid = total.valid;
    est.n_errors = total.errors;
    if (total.valid > 0) {
        est.empirical_rate = static_cast<double>(total.errors) / static_cast<double>(total.valid);
        est.ci_half_width =
            3.0 * std::sqrt(est.empirical_rate * (1.0 - est.empirical_rate) /
                            static_cast<double>(total.valid));
    }
    est.analytic_rate = closed_form_error_rate(cfg);
    return est;
}

}  // namespace sqss
