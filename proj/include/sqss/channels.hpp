#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sqss/linalg.hpp"

namespace sqss {

/// Noise model selector together with its parameter (flip/damping probability
/// p, or gamma for amplitude damping). Factories validate the domain.
class ChannelKind {
  public:
    enum class Family {
        noiseless,
        phase_damping,
        depolarizing,
        bit_flip,
        phase_flip,
        amplitude_damping,
    };

    static ChannelKind noiseless() { return {Family::noiseless, 0.0}; }
    static ChannelKind phase_damping(double p);
    static ChannelKind depolarizing(double p);
    static ChannelKind bit_flip(double p);
    static ChannelKind phase_flip(double p);
    static ChannelKind amplitude_damping(double gamma);

    Family family() const { return family_; }
    double param() const { return param_; }
    std::string_view name() const;

    bool operator==(const ChannelKind&) const = default;

  private:
    ChannelKind(Family f, double param) : family_(f), param_(param) {}
    Family family_;
    double param_;
};

/// Parses the names used in configs and CSV output ("noiseless",
/// "phase-damping", "depolarizing", "bit-flip", "phase-flip",
/// "amplitude-damping"); throws std::invalid_argument on unknown names or
/// out-of-domain parameters.
ChannelKind channel_kind_from_name(std::string_view name, double param);

/// Kraus representation with prefactors absorbed into the operators,
/// e.g. sqrt(1-p)*I. Invariant: sum_k A_k^dagger A_k = I within 1e-12.
struct KrausChannel {
    std::vector<Mat2> ops;
    ChannelKind kind = ChannelKind::noiseless();

    /// Max-norm of sum_k A_k^dagger A_k - I.
    double completeness_defect() const;
};

KrausChannel make_channel(const ChannelKind& kind);

/// Liouville representation sum_k A_k (x) A_k^conj; satisfies
/// to_superop(ch) * vectorize(rho) == vectorize(apply_kraus(ch, rho)).
Superop to_superop(const KrausChannel& ch);

/// rho' = sum_k A_k rho A_k^dagger. The result is validated as a
/// DensityMatrix (trace-preserving, Hermitian, PSD).
DensityMatrix apply_kraus(const KrausChannel& ch, const DensityMatrix& rho);

/// One player's quarter-turn phase choice, q in {0,1,2,3} encoding
/// phi = q*pi/2. The parity bit of q picks the class {0,pi} vs
/// {pi/2,3pi/2} and is announced publicly; the high bit stays secret.
struct PlayerAction {
    int quarter_turn = 0;

    int class_bit() const { return quarter_turn & 1; }
    int secret_bit() const { return quarter_turn >> 1; }
};

/// diag(1, e^{i q pi/2}, e^{-i q pi/2}, 1) built from the exact constants
/// {1, i, -1, -i}; no trig rounding.
Superop phase_gate_superop(int quarter_turn);

/// Same gate with a phase offset: diag(1, e^{i(q pi/2 + eps)}, conj, 1).
/// eps = 0 reproduces phase_gate_superop exactly.
Superop noisy_phase_gate_superop(int quarter_turn, double eps);

/// Right-to-left product: the first element of the sequence acts first.
/// Throws std::invalid_argument on an empty sequence.
Superop compose(std::span<const Superop> sequence);

}  // namespace sqss
