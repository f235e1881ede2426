#include "sqss/channels.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace sqss {

namespace {

void check_unit_interval(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

const Mat2 kPauliX = Mat2::from_rows(0, 1, 1, 0);
const Mat2 kPauliY = Mat2::from_rows(0, cplx(0, -1), cplx(0, 1), 0);
const Mat2 kPauliZ = Mat2::from_rows(1, 0, 0, -1);

// e^{i q pi/2} for q = 0..3, exact.
const cplx kQuarterPhase[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

void check_quarter_turn(int q) {
    if (q < 0 || q > 3) {
        throw std::invalid_argument("quarter turn must lie in {0, 1, 2, 3}");
    }
}

}  // namespace

ChannelKind ChannelKind::phase_damping(double p) {
    check_unit_interval(p, "phase damping p");
    return {Family::phase_damping, p};
}

ChannelKind ChannelKind::depolarizing(double p) {
    check_unit_interval(p, "depolarizing p");
    return {Family::depolarizing, p};
}

ChannelKind ChannelKind::bit_flip(double p) {
    check_unit_interval(p, "bit flip p");
    return {Family::bit_flip, p};
}

ChannelKind ChannelKind::phase_flip(double p) {
    check_unit_interval(p, "phase flip p");
    return {Family::phase_flip, p};
}

ChannelKind ChannelKind::amplitude_damping(double gamma) {
    check_unit_interval(gamma, "amplitude damping gamma");
    return {Family::amplitude_damping, gamma};
}

std::string_view ChannelKind::name() const {
    switch (family_) {
        case Family::noiseless: return "noiseless";
        case Family::phase_damping: return "phase-damping";
        case Family::depolarizing: return "depolarizing";
        case Family::bit_flip: return "bit-flip";
        case Family::phase_flip: return "phase-flip";
        case Family::amplitude_damping: return "amplitude-damping";
    }
    return "?";
}

ChannelKind channel_kind_from_name(std::string_view name, double param) {
    if (name == "noiseless") return ChannelKind::noiseless();
    if (name == "phase-damping") return ChannelKind::phase_damping(param);
    if (name == "depolarizing") return ChannelKind::depolarizing(param);
    if (name == "bit-flip") return ChannelKind::bit_flip(param);
    if (name == "phase-flip") return ChannelKind::phase_flip(param);
    if (name == "amplitude-damping") return ChannelKind::amplitude_damping(param);
    throw std::invalid_argument("unknown channel \"" + std::string(name) +
                                "\" (expected noiseless, phase-damping, depolarizing, "
                                "bit-flip, phase-flip or amplitude-damping)");
}

double KrausChannel::completeness_defect() const {
    Mat2 sum = Mat2::zero();
    for (const Mat2& a : ops) sum = sum + a.dagger() * a;
    return max_abs_diff(sum, Mat2::identity());
}

KrausChannel make_channel(const ChannelKind& kind) {
    using F = ChannelKind::Family;
    const double p = kind.param();
    KrausChannel ch;
    ch.kind = kind;
    switch (kind.family()) {
        case F::noiseless:
            ch.ops = {Mat2::identity()};
            break;
        case F::phase_damping:
            ch.ops = {std::sqrt(1.0 - p) * Mat2::identity(),
                      std::sqrt(p) * Mat2::from_rows(1, 0, 0, 0),
                      std::sqrt(p) * Mat2::from_rows(0, 0, 0, 1)};
            break;
        case F::depolarizing:
            ch.ops = {std::sqrt(1.0 - 0.75 * p) * Mat2::identity(),
                      std::sqrt(0.25 * p) * kPauliX,
                      std::sqrt(0.25 * p) * kPauliY,
                      std::sqrt(0.25 * p) * kPauliZ};
            break;
        case F::bit_flip:
            ch.ops = {std::sqrt(1.0 - p) * Mat2::identity(), std::sqrt(p) * kPauliX};
            break;
        case F::phase_flip:
            ch.ops = {std::sqrt(1.0 - p) * Mat2::identity(), std::sqrt(p) * kPauliZ};
            break;
        case F::amplitude_damping:
            ch.ops = {Mat2::from_rows(1, 0, 0, std::sqrt(1.0 - p)),
                      Mat2::from_rows(0, std::sqrt(p), 0, 0)};
            break;
    }
    return ch;
}

Superop to_superop(const KrausChannel& ch) {
    Superop s;
    for (const Mat2& a : ch.ops) {
        Mat2 a_conj;
        for (int i = 0; i < 4; ++i) a_conj.e[i] = std::conj(a.e[i]);
        s = s + kron(a, a_conj);
    }
    return s;
}

DensityMatrix apply_kraus(const KrausChannel& ch, const DensityMatrix& rho) {
    Mat2 out = Mat2::zero();
    for (const Mat2& a : ch.ops) out = out + a * rho.mat() * a.dagger();
    return DensityMatrix(out);
}

Superop phase_gate_superop(int quarter_turn) {
    check_quarter_turn(quarter_turn);
    const cplx ph = kQuarterPhase[quarter_turn];
    return Superop::diagonal(1.0, ph, std::conj(ph), 1.0);
}

Superop noisy_phase_gate_superop(int quarter_turn, double eps) {
    check_quarter_turn(quarter_turn);
    const cplx ph = kQuarterPhase[quarter_turn] * std::polar(1.0, eps);
    return Superop::diagonal(1.0, ph, std::conj(ph), 1.0);
}

Superop compose(std::span<const Superop> sequence) {
    if (sequence.empty()) {
        throw std::invalid_argument("compose: empty superoperator sequence");
    }
    Superop acc = sequence[0];
    for (std::size_t i = 1; i < sequence.size(); ++i) acc = sequence[i] * acc;
    return acc;
}

}  // namespace sqss
