#include "sqss/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqss {

namespace {

void check_players(int n, int minimum = 1) {
    if (n < minimum) {
        throw std::invalid_argument("n_players must be >= " + std::to_string(minimum));
    }
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1]");
    }
}

void check_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in [0, 1]");
    }
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

double gate_error_prob(int n_players, double eps_bar) {
    check_players(n_players);
    return 0.5 * (1.0 - std::cos(n_players * eps_bar));
}

double gate_error_bound(int n_players, double delta) {
    check_players(n_players);
    check_delta(delta);
    return std::acos(1.0 - delta) / n_players;
}

double gate_error_bound_approx(int n_players, double delta) {
    check_players(n_players);
    check_delta(delta);
    return std::sqrt(2.0 * delta) / n_players;
}

double dephasing_error_prob(int n_players, double p) {
    check_players(n_players);
    check_prob(p);
    return 0.5 * (1.0 - std::pow(1.0 - p, n_players));
}

double dephasing_error_prob_hetero(std::span<const double> ps) {
    if (ps.empty()) {
        throw std::invalid_argument("dephasing_error_prob_hetero: empty parameter list");
    }
    double prod = 1.0;
    for (double p : ps) {
        check_prob(p);
        prod *= 1.0 - p;
    }
    return 0.5 * (1.0 - prod);
}

double noise_bound(int n_players, double delta) {
    check_players(n_players);
    check_delta(delta);
    return 1.0 - std::pow(1.0 - delta, 1.0 / n_players);
}

double noise_bound_approx(int n_players, double delta) {
    check_players(n_players);
    check_delta(delta);
    return delta / n_players;
}

double bitflip_error_prob(int n_players, double p) {
    check_players(n_players, 2);
    check_prob(p);
    return 0.5 * (1.0 - std::pow(1.0 - p, n_players - 1));
}

double phase_flip_error_prob(int n_players, double p) {
    check_players(n_players);
    check_prob(p);
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p, n_players));
}

BitflipTranscript BitflipTranscript::from_actions(std::span<const PlayerAction> actions) {
    BitflipTranscript t;
    t.class_bits.reserve(actions.size());
    t.secret_bits.reserve(actions.size());
    for (const PlayerAction& a : actions) {
        t.class_bits.push_back(a.class_bit());
        t.secret_bits.push_back(a.secret_bit());
    }
    return t;
}

BitflipTranscript BitflipTranscript::from_quarter_turns(std::span<const int> turns) {
    BitflipTranscript t;
    t.class_bits.reserve(turns.size());
    t.secret_bits.reserve(turns.size());
    for (int q : turns) {
        if (q < 0 || q > 3) throw std::invalid_argument("quarter turn must lie in {0,1,2,3}");
        t.class_bits.push_back(q & 1);
        t.secret_bits.push_back(q >> 1);
    }
    return t;
}

bool BitflipTranscript::valid() const {
    int sum = 0;
    for (int b : class_bits) sum += b;
    return sum % 2 == 0;
}

int BitflipTranscript::xi(int m) const {
    if (m < 0 || m > n_players()) {
        throw std::invalid_argument("xi index out of range");
    }
    int sum = 0;
    for (int i = 0; i < m; ++i) sum += class_bits[static_cast<std::size_t>(i)];
    return sum % 2 == 0 ? 1 : -1;
}

int BitflipTranscript::eta() const {
    int sum = 0;
    for (int b : secret_bits) sum += b;
    return sum % 2 == 0 ? 1 : -1;
}

int BitflipTranscript::half_class_sign() const {
    if (!valid()) {
        throw std::invalid_argument("half_class_sign: transcript is not a valid round");
    }
    int sum = 0;
    for (int b : class_bits) sum += b;
    return (sum / 2) % 2 == 0 ? 1 : -1;
}

BitflipBlockProduct bitflip_block_product(const BitflipTranscript& t, double p) {
    check_prob(p);
    if (!t.valid()) {
        throw std::invalid_argument("bitflip_block_product: transcript is not a valid round");
    }
    const int n = t.n_players();
    double plus_prod = 1.0;
    double minus_prod = 1.0;
    for (int m = 1; m <= n; ++m) {
        const int xi_prev = t.xi(m - 1);
        plus_prod *= 1.0 - p + p * xi_prev;
        minus_prod *= 1.0 - p - p * xi_prev;
    }
    const double sign = t.eta() * t.half_class_sign();

    BitflipBlockProduct out;
    out.a_n = sign * plus_prod;
    out.b_n = sign * minus_prod;
    const double g_pow = std::pow(1.0 - 2.0 * p, n);
    out.outer = {0.5 * (1.0 + g_pow), 0.5 * (1.0 - g_pow),
                 0.5 * (1.0 - g_pow), 0.5 * (1.0 + g_pow)};
    return out;
}

double bitflip_conditional_plus(const BitflipTranscript& t, double p) {
    const BitflipBlockProduct blocks = bitflip_block_product(t, p);
    return std::clamp(0.5 * (1.0 + blocks.a_n), 0.0, 1.0);
}

double exhaustive_error_prob(int n_players, std::span<const ChannelKind> links,
                             const GateErrorSpec& gate_error) {
    if (n_players < 2 || n_players > 10) {
        throw std::invalid_argument("exhaustive_error_prob: n_players must lie in [2, 10]");
    }
    if (links.size() != static_cast<std::size_t>(n_players)) {
        throw std::invalid_argument("exhaustive_error_prob: need one link per player");
    }
    if (gate_error.jitter_sigma != 0.0) {
        throw std::invalid_argument(
            "exhaustive_error_prob: requires a deterministic gate error (jitter_sigma == 0)");
    }
    gate_error.validate();

    // Combined per-player step for each quarter turn: link after gate.
    std::vector<std::array<Superop, 4>> steps(static_cast<std::size_t>(n_players));
    for (int m = 0; m < n_players; ++m) {
        const Superop link = to_superop(make_channel(links[static_cast<std::size_t>(m)]));
        for (int q = 0; q < 4; ++q) {
            steps[static_cast<std::size_t>(m)][static_cast<std::size_t>(q)] =
                link * noisy_phase_gate_superop(q, gate_error.mean_eps);
        }
    }

    const VecState initial = vectorize(DensityMatrix::plus_state().mat());
    KahanSum error_sum;
    std::int64_t n_valid = 0;

    // Depth-first over the 4^N transcripts, sharing state prefixes.
    auto recurse = [&](auto&& self, int depth, const VecState& v, int turn_sum) -> void {
        if (depth == n_players) {
            if (turn_sum % 2 != 0) return;  // class bits sum odd: sieved out
            ++n_valid;
            const double p_plus =
                std::clamp(0.5 * (v[0] + v[1] + v[2] + v[3]).real(), 0.0, 1.0);
            const int ideal = (turn_sum / 2) % 2;
            error_sum.add(ideal == 0 ? 1.0 - p_plus : p_plus);
            return;
        }
        for (int q = 0; q < 4; ++q) {
            self(self, depth + 1,
                 steps[static_cast<std::size_t>(depth)][static_cast<std::size_t>(q)] * v,
                 turn_sum + q);
        }
    };
    recurse(recurse, 0, initial, 0);

    return error_sum.sum / static_cast<double>(n_valid);
}

double exhaustive_error_prob(int n_players, const ChannelKind& link,
                             const GateErrorSpec& gate_error) {
    std::vector<ChannelKind> links(static_cast<std::size_t>(std::max(n_players, 0)), link);
    return exhaustive_error_prob(n_players, links, gate_error);
}

std::array<Table1Row, 8> table1(double p) {
    check_prob(p);
    const Superop link = to_superop(make_channel(ChannelKind::bit_flip(p)));
    const VecState initial = vectorize(DensityMatrix::plus_state().mat());

    constexpr std::array<std::array<int, 2>, 8> kTurnPairs{{
        {0, 0}, {0, 2}, {2, 0}, {2, 2}, {1, 1}, {1, 3}, {3, 1}, {3, 3},
    }};

    std::array<Table1Row, 8> rows;
    for (std::size_t i = 0; i < kTurnPairs.size(); ++i) {
        const auto [q1, q2] = kTurnPairs[i];
        VecState v = link * (phase_gate_superop(q1) * initial);
        v = link * (phase_gate_superop(q2) * v);

        Table1Row row;
        row.q1 = q1;
        row.q2 = q2;
        row.coherence = 2.0 * v[1].real();
        const DensityMatrix rho(devectorize(v));
        row.p_plus = x_plus_prob(rho);
        row.p_minus = x_minus_prob(rho);
        const int expected = ((q1 + q2) / 2) % 2;
        row.p_error = expected == 0 ? row.p_minus : row.p_plus;
        rows[i] = row;
    }
    return rows;
}

}  // namespace sqss
