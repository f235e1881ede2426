#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sqss/analytics.hpp"
#include "sqss/protocol.hpp"

using namespace sqss;

namespace {

RoundRecord record_with_turns(const std::vector<int>& turns, int outcome) {
    std::vector<PlayerAction> actions;
    int class_sum = 0;
    int turn_sum = 0;
    for (int q : turns) {
        actions.push_back(PlayerAction{q});
        class_sum += q & 1;
        turn_sum += q;
    }
    const bool valid = class_sum % 2 == 0;
    return RoundRecord{
        .round_index = 0,
        .actions = std::move(actions),
        .eps_draws = std::vector<double>(turns.size(), 0.0),
        .final_state = DensityMatrix::plus_state(),
        .valid = valid,
        .outcome = outcome,
        .ideal_outcome = valid ? (turn_sum / 2) % 2 : -1,
    };
}

// Searches round indices until the drawn actions equal `wanted`.
RoundRecord find_round_with_actions(const ProtocolConfig& cfg, const std::vector<int>& wanted) {
    for (std::int64_t idx = 0; idx < 4000; ++idx) {
        RoundRecord rec = run_round(cfg, idx);
        bool match = rec.actions.size() == wanted.size();
        for (std::size_t i = 0; match && i < wanted.size(); ++i) {
            match = rec.actions[i].quarter_turn == wanted[i];
        }
        if (match) return rec;
    }
    FAIL("no round with the requested actions in 4000 draws");
    throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(ProtocolConfig::uniform_links(1, ChannelKind::noiseless(), 10, 0),
                    std::invalid_argument);
    ProtocolConfig cfg = ProtocolConfig::uniform_links(3, ChannelKind::noiseless(), 10, 0);
    cfg.links.pop_back();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.links.push_back(ChannelKind::noiseless());
    cfg.n_rounds = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("gate error spec must preserve the phase class") {
    CHECK_NOTHROW((GateErrorSpec{0.1, 0.05}).validate());
    CHECK_THROWS_AS((GateErrorSpec{0.7, 0.05}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((GateErrorSpec{std::numbers::pi / 4, 0.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS((GateErrorSpec{0.0, -0.1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((GateErrorSpec{0.0, 0.3}).validate(), std::invalid_argument);
}

TEST_CASE("noiseless two-player rounds reproduce the reference states") {
    const ProtocolConfig cfg = ProtocolConfig::uniform_links(2, ChannelKind::noiseless(), 1, 5);

    const RoundRecord zeros = find_round_with_actions(cfg, {0, 0});
    CHECK(zeros.valid);
    CHECK(max_abs_diff(zeros.final_state.mat(), DensityMatrix::plus_state().mat()) < 1e-15);
    CHECK(zeros.outcome == 0);
    CHECK(zeros.ideal_outcome == 0);

    const RoundRecord pi_zero = find_round_with_actions(cfg, {2, 0});
    CHECK(pi_zero.valid);
    CHECK(max_abs_diff(pi_zero.final_state.mat(), DensityMatrix::minus_state().mat()) < 1e-15);
    CHECK(pi_zero.outcome == 1);
    CHECK(pi_zero.ideal_outcome == 1);
}

TEST_CASE("bit-flip two-player round (pi/2, pi/2)") {
    const double p = 0.3;
    const ProtocolConfig cfg = ProtocolConfig::uniform_links(2, ChannelKind::bit_flip(p), 1, 5);
    const RoundRecord rec = find_round_with_actions(cfg, {1, 1});
    const Mat2 expected = Mat2::from_rows(0.5, 0.5 * (2 * p - 1), 0.5 * (2 * p - 1), 0.5);
    CHECK(max_abs_diff(rec.final_state.mat(), expected) < 1e-12);
    CHECK(x_plus_prob(rec.final_state) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("round records are reproducible from their own draws") {
    ProtocolConfig cfg = ProtocolConfig::uniform_links(4, ChannelKind::depolarizing(0.2), 1, 99,
                                                       GateErrorSpec{0.02, 0.01});
    for (std::int64_t idx = 0; idx < 50; ++idx) {
        const RoundRecord rec = run_round(cfg, idx);
        VecState v = vectorize(DensityMatrix::plus_state().mat());
        const Superop link = to_superop(make_channel(cfg.links[0]));
        for (int m = 0; m < cfg.n_players; ++m) {
            v = noisy_phase_gate_superop(rec.actions[static_cast<std::size_t>(m)].quarter_turn,
                                         rec.eps_draws[static_cast<std::size_t>(m)]) *
                v;
            v = link * v;
        }
        CHECK(max_abs_diff(v, vectorize(rec.final_state.mat())) == 0.0);
        CHECK(rec.valid == is_valid(rec));
    }
}

TEST_CASE("validity and ideal outcome from class bits") {
    CHECK(is_valid(record_with_turns({0, 0}, 0)));
    CHECK_FALSE(is_valid(record_with_turns({1, 0}, 0)));
    CHECK(is_valid(record_with_turns({1, 1, 1, 1}, 0)));

    CHECK(ideal_outcome(record_with_turns({0, 0}, 0)) == 0);
    CHECK(ideal_outcome(record_with_turns({2, 0}, 0)) == 1);
    CHECK(ideal_outcome(record_with_turns({1, 3}, 0)) == 0);
    CHECK_THROWS_AS(ideal_outcome(record_with_turns({1, 0}, 0)), std::invalid_argument);
}

TEST_CASE("key shares of all valid two-player transcripts") {
    // Independent oracle: in a noiseless round the measured outcome is
    // (q1+q2)/2 mod 2, and the shares must XOR to zero.
    int n_valid = 0;
    for (int q1 = 0; q1 < 4; ++q1) {
        for (int q2 = 0; q2 < 4; ++q2) {
            if ((q1 + q2) % 2 != 0) continue;
            ++n_valid;
            const int measured = ((q1 + q2) / 2) % 2;
            const RoundRecord rec = record_with_turns({q1, q2}, measured);
            const KeyShares shares = extract_key_shares(rec);
            REQUIRE(shares.bits.size() == 2);
            CHECK(shares.parity() == 0);
            CHECK(shares.bits[1] == q2 >> 1);
        }
    }
    CHECK(n_valid == 8);

    // the two worked examples
    const KeyShares quarter = extract_key_shares(record_with_turns({1, 3}, 0));
    CHECK(quarter.bits == std::vector<int>{1, 1});
    const KeyShares pi_zero = extract_key_shares(record_with_turns({2, 0}, 1));
    CHECK(pi_zero.bits == std::vector<int>{0, 0});

    CHECK_THROWS_AS(extract_key_shares(record_with_turns({1, 0}, 0)), std::invalid_argument);
}

TEST_CASE("noiseless rounds have perfect correlation and fair sieving") {
    const ProtocolConfig cfg = ProtocolConfig::uniform_links(3, ChannelKind::noiseless(), 10000, 7);
    std::int64_t n_valid = 0;
    std::int64_t invalid_plus = 0;
    run_experiment(cfg, [&](const RoundRecord& rec) {
        if (rec.valid) {
            ++n_valid;
            CHECK(rec.outcome == rec.ideal_outcome);
            CHECK(extract_key_shares(rec).parity() == 0);
        } else {
            invalid_plus += rec.outcome == 0;
        }
    });
    const ErrorEstimate est = run_experiment(cfg);
    CHECK(est.n_errors == 0);
    CHECK(est.empirical_rate == 0.0);
    CHECK(est.analytic_rate == 0.0);

    const double sieve_band = 3.0 * std::sqrt(0.25 / 10000.0);
    CHECK(std::fabs(static_cast<double>(n_valid) / 10000.0 - 0.5) <= sieve_band);
    const auto n_invalid = 10000 - n_valid;
    const double plus_fraction = static_cast<double>(invalid_plus) / static_cast<double>(n_invalid);
    CHECK(std::fabs(plus_fraction - 0.5) <= 3.0 * std::sqrt(0.25 / static_cast<double>(n_invalid)));
}

TEST_CASE("monte carlo agrees with the dephasing closed form") {
    const ProtocolConfig cfg =
        ProtocolConfig::uniform_links(5, ChannelKind::phase_damping(0.05), 200000, 7);
    const ErrorEstimate est = run_experiment(cfg);
    REQUIRE(est.analytic_rate.has_value());
    const double a = *est.analytic_rate;
    CHECK(a == doctest::Approx(dephasing_error_prob(5, 0.05)).epsilon(1e-15));
    CHECK(std::fabs(est.empirical_rate - a) <=
          3.0 * std::sqrt(a * (1 - a) / static_cast<double>(est.n_valid)));
}

TEST_CASE("a fully decohering link destroys all correlation") {
    ProtocolConfig cfg = ProtocolConfig::uniform_links(3, ChannelKind::noiseless(), 100000, 21);
    cfg.links[1] = ChannelKind::phase_damping(1.0);
    const ErrorEstimate est = run_experiment(cfg);
    REQUIRE(est.analytic_rate.has_value());
    CHECK(*est.analytic_rate == 0.5);
    CHECK(std::fabs(est.empirical_rate - 0.5) <=
          3.0 * std::sqrt(0.25 / static_cast<double>(est.n_valid)));
}

TEST_CASE("identical seeds give identical transcripts at any thread count") {
    const ProtocolConfig cfg = ProtocolConfig::uniform_links(
        4, ChannelKind::depolarizing(0.1), 5000, 123, GateErrorSpec{0.05, 0.02});
    struct Digest {
        std::vector<int> outcomes;
        std::vector<double> eps;
        ErrorEstimate est;
    };
    auto collect = [&](int threads) {
        Digest d;
        d.est = run_experiment(
            cfg,
            [&](const RoundRecord& rec) {
                d.outcomes.push_back(rec.outcome);
                d.eps.push_back(rec.eps_draws[0]);
            },
            threads);
        return d;
    };
    const Digest one = collect(1);
    const Digest four = collect(4);
    const Digest rerun = collect(1);
    CHECK(one.outcomes == four.outcomes);
    CHECK(one.outcomes == rerun.outcomes);
    CHECK(one.eps == four.eps);
    CHECK(one.est.n_valid == four.est.n_valid);
    CHECK(one.est.n_errors == four.est.n_errors);
    CHECK(one.est.empirical_rate == four.est.empirical_rate);
}

TEST_CASE("eps draws are deterministic offsets when jitter is zero") {
    const ProtocolConfig cfg = ProtocolConfig::uniform_links(3, ChannelKind::noiseless(), 20, 3,
                                                             GateErrorSpec{0.08, 0.0});
    run_experiment(cfg, [&](const RoundRecord& rec) {
        for (double e : rec.eps_draws) CHECK(e == 0.08);
    });
}

TEST_CASE("an experiment with zero valid rounds reports instead of crashing") {
    ProtocolConfig cfg = ProtocolConfig::uniform_links(2, ChannelKind::noiseless(), 1, 0);
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        cfg.master_seed = seed;
        const RoundRecord rec = run_round(cfg, 0);
        if (!rec.valid) {
            const ErrorEstimate est = run_experiment(cfg);
            CHECK(est.n_valid == 0);
            CHECK(est.n_errors == 0);
            CHECK(est.empirical_rate == 0.0);
            CHECK(est.ci_half_width == 0.0);
            return;
        }
    }
    FAIL("no seed produced an invalid single round");
}

TEST_CASE("closed-form attachment rules") {
    using CK = ChannelKind;
    auto cfg = ProtocolConfig::uniform_links(4, CK::noiseless(), 10, 0, GateErrorSpec{0.1, 0.0});
    CHECK(closed_form_error_rate(cfg) ==
          doctest::Approx(gate_error_prob(4, 0.1)).epsilon(1e-15));

    cfg.gate_error = GateErrorSpec{0.1, 0.01};
    CHECK_FALSE(closed_form_error_rate(cfg).has_value());

    cfg.gate_error = {};
    cfg.links = {CK::phase_damping(0.1), CK::depolarizing(0.2), CK::noiseless(),
                 CK::phase_damping(0.3)};
    const std::vector<double> ps{0.1, 0.2, 0.0, 0.3};
    CHECK(*closed_form_error_rate(cfg) ==
          doctest::Approx(dephasing_error_prob_hetero(ps)).epsilon(1e-15));

    cfg.links = std::vector<ChannelKind>(4, CK::bit_flip(0.2));
    CHECK(*closed_form_error_rate(cfg) ==
          doctest::Approx(bitflip_error_prob(4, 0.2)).epsilon(1e-15));

    cfg.links[2] = CK::bit_flip(0.3);  // heterogeneous bit flip: no closed form
    CHECK_FALSE(closed_form_error_rate(cfg).has_value());

    cfg.links = std::vector<ChannelKind>(4, CK::phase_flip(0.2));
    CHECK_FALSE(closed_form_error_rate(cfg).has_value());

    // gate error on top of channel noise: no closed form either
    cfg.links = std::vector<ChannelKind>(4, CK::phase_damping(0.1));
    cfg.gate_error = GateErrorSpec{0.05, 0.0};
    CHECK_FALSE(closed_form_error_rate(cfg).has_value());
}

TEST_CASE("hundred-seed battery stays inside three sigma almost always") {
    struct Config {
        const char* label;
        ProtocolConfig cfg;
    };
    const std::vector<Config> battery{
        {"dephasing", ProtocolConfig::uniform_links(3, ChannelKind::phase_damping(0.05), 20000, 0)},
        {"bit flip", ProtocolConfig::uniform_links(4, ChannelKind::bit_flip(0.1), 20000, 0)},
        {"gate error", ProtocolConfig::uniform_links(5, ChannelKind::noiseless(), 20000, 0,
                                                     GateErrorSpec{0.08, 0.0})},
    };
    for (const Config& entry : battery) {
        CAPTURE(entry.label);
        ProtocolConfig cfg = entry.cfg;
        const double a = *closed_form_error_rate(cfg);
        int within = 0;
        for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
            cfg.master_seed = seed;
            const ErrorEstimate est = run_experiment(cfg);
            const double band = 3.0 * std::sqrt(a * (1 - a) / static_cast<double>(est.n_valid));
            within += std::fabs(est.empirical_rate - a) <= band;
        }
        CHECK(within >= 99);
    }
}

TEST_CASE("states stay valid density matrices after every application") {
    const std::vector<ChannelKind> links{
        ChannelKind::amplitude_damping(0.4), ChannelKind::bit_flip(0.2),
        ChannelKind::depolarizing(0.6), ChannelKind::phase_flip(0.9)};
    ProtocolConfig cfg;
    cfg.n_players = static_cast<int>(links.size());
    cfg.links = links;
    cfg.gate_error = GateErrorSpec{0.1, 0.03};
    cfg.n_rounds = 1;
    cfg.master_seed = 2;
    for (std::int64_t idx = 0; idx < 40; ++idx) {
        const RoundRecord rec = run_round(cfg, idx);
        VecState v = vectorize(DensityMatrix::plus_state().mat());
        for (int m = 0; m < cfg.n_players; ++m) {
            v = noisy_phase_gate_superop(rec.actions[static_cast<std::size_t>(m)].quarter_turn,
                                         rec.eps_draws[static_cast<std::size_t>(m)]) *
                v;
            CHECK_NOTHROW(DensityMatrix(devectorize(v)));
            v = to_superop(make_channel(links[static_cast<std::size_t>(m)])) * v;
            CHECK_NOTHROW(DensityMatrix(devectorize(v)));
        }
    }
}

TEST_CASE("link m acts right after player m's gate") {
    // A fully damping first link then a full flip pins the qubit to |1><1|;
    // the reverse order pins it to |0><0|.
    ProtocolConfig cfg;
    cfg.n_players = 2;
    cfg.links = {ChannelKind::amplitude_damping(1.0), ChannelKind::bit_flip(1.0)};
    cfg.n_rounds = 1;
    cfg.master_seed = 4;
    const Mat2 one = Mat2::from_rows(0, 0, 0, 1);
    CHECK(max_abs_diff(run_round(cfg, 0).final_state.mat(), one) < 1e-15);

    cfg.links = {ChannelKind::bit_flip(1.0), ChannelKind::amplitude_damping(1.0)};
    CHECK(max_abs_diff(run_round(cfg, 0).final_state.mat(),
                       DensityMatrix::zero_state().mat()) < 1e-15);
}
