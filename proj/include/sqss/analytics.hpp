#pragma once

#include <array>
#include <span>
#include <vector>

#include "sqss/channels.hpp"
#include "sqss/protocol.hpp"

namespace sqss {

/// Error rate under a deterministic per-player phase offset eps_bar and
/// noiseless links: (1 - cos(N*eps_bar)) / 2.
double gate_error_prob(int n_players, double eps_bar);

/// Largest admissible |eps_bar| keeping gate_error_prob below delta/2:
/// arccos(1 - delta) / N. delta in (0, 1].
double gate_error_bound(int n_players, double delta);

/// Small-delta approximation sqrt(2*delta) / N of gate_error_bound.
double gate_error_bound_approx(int n_players, double delta);

/// (1 - (1-p)^N) / 2: error rate with phase damping of strength p on every
/// link. Also exact for depolarizing links, which leave the protocol's final
/// state identical.
double dephasing_error_prob(int n_players, double p);

/// (1 - prod_i (1-p_i)) / 2 for per-link phase damping strengths.
double dephasing_error_prob_hetero(std::span<const double> ps);

/// Largest admissible p keeping dephasing_error_prob below delta/2:
/// 1 - (1-delta)^(1/N).
double noise_bound(int n_players, double delta);

/// Approximation delta / N of noise_bound.
double noise_bound_approx(int n_players, double delta);

/// (1 - (1-p)^(N-1)) / 2: error rate with bit flips of strength p on every
/// link. Requires N >= 2.
double bitflip_error_prob(int n_players, double p);

/// (1 - (1-2p)^N) / 2 for phase-flip links. No published derivation backs
/// this form; it is confirmed against exhaustive_error_prob in the tests
/// before anything reports it.
double phase_flip_error_prob(int n_players, double p);

/// Class/secret bit view of one round's actions, with the derived sign
/// sequences the bit-flip block algebra runs on.
struct BitflipTranscript {
    std::vector<int> class_bits;   // p_m
    std::vector<int> secret_bits;  // s_m

    static BitflipTranscript from_actions(std::span<const PlayerAction> actions);
    static BitflipTranscript from_quarter_turns(std::span<const int> turns);

    int n_players() const { return static_cast<int>(class_bits.size()); }
    bool valid() const;  // class bits sum to 0 mod 2

    /// xi_m = (-1)^(p_1 + ... + p_m); xi(0) = +1.
    int xi(int m) const;
    /// eta = (-1)^(s_1 + ... + s_N).
    int eta() const;
    /// (-1)^(sum p_m / 2); valid rounds only. The half-sum parity the final
    /// coherence picks up from the accumulated quarter turns.
    int half_class_sign() const;
};

/// Block-diagonal decomposition of the N-step bit-flip round: the outer 2x2
/// block acting on (rho00, rho11) and the reassembled inner coherence.
/// ρ_f = ((1, a_n), (a_n, 1)) / 2 matches the full superoperator product.
struct BitflipBlockProduct {
    double a_n = 0.0;
    double b_n = 0.0;
    std::array<double, 4> outer{};  // row-major 2x2
};

/// Valid rounds only (throws std::invalid_argument otherwise):
/// a_n = eta * half_class_sign * prod_m (1 - p + p*xi(m-1)), b_n likewise
/// with the minus sign, outer = ((1+g^N, 1-g^N), (1-g^N, 1+g^N))/2 for
/// g = 1-2p.
BitflipBlockProduct bitflip_block_product(const BitflipTranscript& t, double p);

/// P(+| transcript) = (1 + a_n) / 2 under bit-flip links, clamped to [0, 1].
/// Valid rounds only.
double bitflip_conditional_plus(const BitflipTranscript& t, double p);

/// Exact protocol error rate by enumerating all 4^N transcripts, keeping the
/// valid half, reading each error probability off the final density matrix
/// and averaging uniformly (compensated summation). Ground truth for every
/// closed form above and for channels that have none. N <= 10; the gate
/// error must be deterministic (jitter_sigma == 0).
double exhaustive_error_prob(int n_players, std::span<const ChannelKind> links,
                             const GateErrorSpec& gate_error = {});

/// Homogeneous-links convenience overload.
double exhaustive_error_prob(int n_players, const ChannelKind& link,
                             const GateErrorSpec& gate_error = {});

/// One row of the two-player bit-flip table: quarter turns, final coherence
/// a (rho_f = ((1,a),(a,1))/2), the X outcome probabilities and the error
/// probability given the transcript's dictated outcome.
struct Table1Row {
    int q1 = 0;
    int q2 = 0;
    double coherence = 0.0;
    double p_plus = 0.0;
    double p_minus = 0.0;
    double p_error = 0.0;
};

/// All 8 valid two-player transcripts under bit-flip links of strength p,
/// computed from the superoperator engine. Row order: the four Class-0
/// pairs (0,0),(0,pi),(pi,0),(pi,pi), then (pi/2,pi/2),(pi/2,3pi/2),
/// (3pi/2,pi/2),(3pi/2,3pi/2).
std::array<Table1Row, 8> table1(double p);

}  // namespace sqss
