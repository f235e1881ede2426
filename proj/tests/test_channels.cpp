#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sqss/channels.hpp"
#include "sqss/rng.hpp"

using namespace sqss;

namespace {

Mat2 random_density(RoundRng& rng) {
    Mat2 g;
    for (int i = 0; i < 4; ++i) g.e[i] = cplx(rng.next_gaussian(), rng.next_gaussian());
    const Mat2 gram = g * g.dagger();
    return cplx(1.0 / gram.trace().real(), 0.0) * gram;
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

// Direct Kraus action on an arbitrary (not necessarily density) matrix.
Mat2 apply_ops(const KrausChannel& ch, const Mat2& m) {
    Mat2 out = Mat2::zero();
    for (const Mat2& a : ch.ops) out = out + a * m * a.dagger();
    return out;
}

const std::vector<ChannelKind> kZoo(double p) {
    return {ChannelKind::noiseless(),   ChannelKind::phase_damping(p),
            ChannelKind::depolarizing(p), ChannelKind::bit_flip(p),
            ChannelKind::phase_flip(p),   ChannelKind::amplitude_damping(p)};
}

}  // namespace

TEST_CASE("channel parameters are domain checked") {
    CHECK_THROWS_AS(ChannelKind::phase_damping(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(ChannelKind::depolarizing(1.1), std::invalid_argument);
    CHECK_THROWS_AS(channel_kind_from_name("bit-flip", 2.0), std::invalid_argument);
    CHECK_THROWS_AS(channel_kind_from_name("white-noise", 0.1), std::invalid_argument);
    CHECK(channel_kind_from_name("amplitude-damping", 0.3).param() == 0.3);
}

TEST_CASE("phase damping action on a general matrix") {
    const double p = 0.3;
    const KrausChannel ch = make_channel(ChannelKind::phase_damping(p));
    const Mat2 m = Mat2::from_rows(cplx(0.2, 0.1), cplx(0.3, -0.4), cplx(-0.1, 0.2), cplx(0.5, 0));
    const Mat2 out = apply_ops(ch, m);
    CHECK(std::abs(out.at(0, 0) - m.at(0, 0)) < 1e-15);
    CHECK(std::abs(out.at(1, 1) - m.at(1, 1)) < 1e-15);
    CHECK(std::abs(out.at(0, 1) - (1.0 - p) * m.at(0, 1)) < 1e-15);
    CHECK(std::abs(out.at(1, 0) - (1.0 - p) * m.at(1, 0)) < 1e-15);
}

TEST_CASE("bit flip action on a general matrix") {
    const double p = 0.2;
    const KrausChannel ch = make_channel(ChannelKind::bit_flip(p));
    const cplx a(0.3, 0.0), b(0.1, 0.2), c(0.1, -0.2), d(0.7, 0.0);
    const Mat2 out = apply_ops(ch, Mat2::from_rows(a, b, c, d));
    CHECK(std::abs(out.at(0, 0) - ((1 - p) * a + p * d)) < 1e-15);
    CHECK(std::abs(out.at(0, 1) - ((1 - p) * b + p * c)) < 1e-15);
    CHECK(std::abs(out.at(1, 0) - ((1 - p) * c + p * b)) < 1e-15);
    CHECK(std::abs(out.at(1, 1) - ((1 - p) * d + p * a)) < 1e-15);
}

TEST_CASE("depolarizing action mixes toward the identity") {
    const double p = 0.4;
    const KrausChannel ch = make_channel(ChannelKind::depolarizing(p));
    const cplx a(0.6, 0.0), b(0.2, 0.1), c(0.2, -0.1), d(0.4, 0.0);
    const Mat2 out = apply_ops(ch, Mat2::from_rows(a, b, c, d));
    CHECK(std::abs(out.at(0, 0) - ((1 - p / 2) * a + (p / 2) * d)) < 1e-15);
    CHECK(std::abs(out.at(0, 1) - (1 - p) * b) < 1e-15);
    CHECK(std::abs(out.at(1, 0) - (1 - p) * c) < 1e-15);
    CHECK(std::abs(out.at(1, 1) - ((1 - p / 2) * d + (p / 2) * a)) < 1e-15);
}

TEST_CASE("every channel at zero strength is the identity map") {
    RoundRng rng = RoundRng::child(10, 0);
    for (const ChannelKind& kind : kZoo(0.0)) {
        const KrausChannel ch = make_channel(kind);
        for (int i = 0; i < 100; ++i) {
            const Mat2 rho = random_density(rng);
            CHECK(max_abs_diff(apply_ops(ch, rho), rho) < 1e-14);
        }
    }
}

TEST_CASE("kraus sets are complete") {
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        for (const ChannelKind& kind : kZoo(p)) {
            CHECK(make_channel(kind).completeness_defect() < 1e-12);
            CHECK(make_channel(kind).ops.size() >= 1);
            CHECK(make_channel(kind).ops.size() <= 4);
        }
    }
}

TEST_CASE("superoperators match their closed matrix forms") {
    const double p = 0.35;
    const Superop deph = to_superop(make_channel(ChannelKind::phase_damping(p)));
    CHECK(max_abs_diff(deph, Superop::diagonal(1, 1 - p, 1 - p, 1)) < 1e-14);

    Superop depol_expected = Superop::diagonal(1 - p / 2, 1 - p, 1 - p, 1 - p / 2);
    depol_expected.at(0, 3) = p / 2;
    depol_expected.at(3, 0) = p / 2;
    CHECK(max_abs_diff(to_superop(make_channel(ChannelKind::depolarizing(p))), depol_expected) <
          1e-14);

    Superop flip_expected = Superop::diagonal(1 - p, 1 - p, 1 - p, 1 - p);
    flip_expected.at(0, 3) = p;
    flip_expected.at(3, 0) = p;
    flip_expected.at(1, 2) = p;
    flip_expected.at(2, 1) = p;
    CHECK(max_abs_diff(to_superop(make_channel(ChannelKind::bit_flip(p))), flip_expected) < 1e-14);

    CHECK(max_abs_diff(to_superop(make_channel(ChannelKind::phase_flip(p))),
                       Superop::diagonal(1, 1 - 2 * p, 1 - 2 * p, 1)) < 1e-14);
}

TEST_CASE("apply_kraus on reference states") {
    const DensityMatrix full_decohered =
        apply_kraus(make_channel(ChannelKind::phase_damping(1.0)), DensityMatrix::plus_state());
    CHECK(max_abs_diff(full_decohered.mat(), DensityMatrix::maximally_mixed().mat()) < 1e-15);

    const double p = 0.2;
    const DensityMatrix flipped =
        apply_kraus(make_channel(ChannelKind::bit_flip(p)), DensityMatrix::zero_state());
    CHECK(max_abs_diff(flipped.mat(), Mat2::from_rows(1 - p, 0, 0, p)) < 1e-15);

    const DensityMatrix plus = DensityMatrix::plus_state();
    CHECK(max_abs_diff(apply_kraus(make_channel(ChannelKind::noiseless()), plus).mat(),
                       plus.mat()) == 0.0);
}

TEST_CASE("channel superoperators preserve the trace on basis states") {
    // Trace of the devectorized image of every basis matrix must match the
    // trace of the input, which pins the row-sum structure of the map.
    for (double p : {0.1, 0.5, 1.0}) {
        for (const ChannelKind& kind : kZoo(p)) {
            const Superop s = to_superop(make_channel(kind));
            for (int basis = 0; basis < 4; ++basis) {
                VecState e;
                e[basis] = 1.0;
                const cplx in_trace = basis == 0 || basis == 3 ? 1.0 : 0.0;
                CHECK(std::abs(devectorize(s * e).trace() - in_trace) < 1e-12);
            }
        }
    }
}

TEST_CASE("kraus application equals superoperator action") {
    RoundRng rng = RoundRng::child(11, 0);
    for (int i = 0; i < 1000; ++i) {
        const KrausChannel ch = make_channel(random_channel(rng));
        const Mat2 rho = random_density(rng);
        const VecState via_kraus = vectorize(apply_kraus(ch, DensityMatrix(rho)).mat());
        const VecState via_superop = to_superop(ch) * vectorize(rho);
        CHECK(max_abs_diff(via_kraus, via_superop) < 1e-12);
    }
}

TEST_CASE("phase gates use exact quarter-turn constants") {
    CHECK(max_abs_diff(phase_gate_superop(0), Superop::identity()) == 0.0);
    CHECK(max_abs_diff(phase_gate_superop(2), Superop::diagonal(1, -1, -1, 1)) == 0.0);
    const Superop quarter = phase_gate_superop(1);
    CHECK(quarter.at(1, 1) == cplx(0, 1));
    CHECK(quarter.at(2, 2) == cplx(0, -1));
    CHECK_THROWS_AS(phase_gate_superop(4), std::invalid_argument);
    CHECK_THROWS_AS(phase_gate_superop(-1), std::invalid_argument);
}

TEST_CASE("noisy phase gate") {
    for (int q = 0; q < 4; ++q) {
        CHECK(max_abs_diff(noisy_phase_gate_superop(q, 0.0), phase_gate_superop(q)) == 0.0);
    }
    const Superop g = noisy_phase_gate_superop(1, 0.01);
    const cplx expected = std::exp(cplx(0, 1) * (std::numbers::pi / 2 + 0.01));
    CHECK(std::abs(g.at(1, 1) - expected) < 1e-15);
    CHECK(std::abs(g.at(2, 2) - std::conj(expected)) < 1e-15);

    // N applications of a pure offset turn <+|rho|+> into (1 + cos(N eps))/2.
    const double eps = 0.3;
    const int n = 7;
    VecState v = vectorize(DensityMatrix::plus_state().mat());
    for (int i = 0; i < n; ++i) v = noisy_phase_gate_superop(0, eps) * v;
    const double p_plus = x_plus_prob(DensityMatrix(devectorize(v)));
    CHECK(p_plus == doctest::Approx(0.5 * (1 + std::cos(n * eps))).epsilon(1e-12));
}

TEST_CASE("compose applies the first element first") {
    CHECK_THROWS_AS(compose({}), std::invalid_argument);

    const std::vector<Superop> single{Superop::identity()};
    CHECK(max_abs_diff(compose(single), Superop::identity()) == 0.0);

    // Bit flips do not commute with the quarter gate, so the order must be
    // visible in the product.
    const Superop flip = to_superop(make_channel(ChannelKind::bit_flip(0.4)));
    const Superop gate = phase_gate_superop(1);
    const std::vector<Superop> flip_then_gate{flip, gate};
    CHECK(max_abs_diff(compose(flip_then_gate), gate * flip) == 0.0);
    CHECK(max_abs_diff(compose(flip_then_gate), flip * gate) > 1e-3);
}

TEST_CASE("compose of superops equals sequential kraus application") {
    RoundRng rng = RoundRng::child(12, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int steps = 1 + static_cast<int>(rng.next_u64() % 5);
        std::vector<KrausChannel> chain;
        std::vector<Superop> superops;
        for (int i = 0; i < steps; ++i) {
            chain.push_back(make_channel(random_channel(rng)));
            superops.push_back(to_superop(chain.back()));
        }
        DensityMatrix rho(random_density(rng));
        VecState v = vectorize(rho.mat());
        for (const KrausChannel& ch : chain) rho = apply_kraus(ch, rho);
        v = compose(superops) * v;
        CHECK(max_abs_diff(v, vectorize(rho.mat())) < 1e-12);
    }
}

TEST_CASE("composed dephased rounds accumulate phase and shrink coherence") {
    // N gate+damping steps send |+><+| to
    // (1, (1-p)^N e^{i phi}, (1-p)^N e^{-i phi}, 1)/2 with phi the summed
    // quarter turns.
    const double p = 0.2;
    const Superop deph = to_superop(make_channel(ChannelKind::phase_damping(p)));
    const std::vector<int> turns{1, 3, 2, 1};
    std::vector<Superop> sequence;
    int turn_sum = 0;
    for (int q : turns) {
        sequence.push_back(phase_gate_superop(q));
        sequence.push_back(deph);
        turn_sum += q;
    }
    const VecState v = compose(sequence) * vectorize(DensityMatrix::plus_state().mat());
    const cplx phase = std::pow(cplx(0, 1), turn_sum);
    const double shrink = std::pow(1 - p, static_cast<int>(turns.size()));
    CHECK(std::abs(v[0] - 0.5) < 1e-14);
    CHECK(std::abs(v[1] - 0.5 * shrink * phase) < 1e-14);
    CHECK(std::abs(v[2] - 0.5 * shrink * std::conj(phase)) < 1e-14);
    CHECK(std::abs(v[3] - 0.5) < 1e-14);
}

TEST_CASE("dephasing shrinks coherence by exactly (1-p) per pass") {
    const double p = 0.15;
    const Superop deph = to_superop(make_channel(ChannelKind::phase_damping(p)));
    RoundRng rng = RoundRng::child(13, 0);
    VecState v = vectorize(DensityMatrix::plus_state().mat());
    for (int k = 1; k <= 12; ++k) {
        v = deph * (phase_gate_superop(static_cast<int>(rng.next_u64() % 4)) * v);
        CHECK(std::abs(v[1]) == doctest::Approx(0.5 * std::pow(1 - p, k)).epsilon(1e-12));
    }
}

TEST_CASE("diagonal channels commute with the phase gates") {
    for (const ChannelKind& kind :
         {ChannelKind::phase_damping(0.3), ChannelKind::phase_flip(0.3)}) {
        const Superop ch = to_superop(make_channel(kind));
        for (int q = 0; q < 4; ++q) {
            const Superop gate = phase_gate_superop(q);
            CHECK(max_abs_diff(ch * gate, gate * ch) < 1e-14);
        }
    }
}

TEST_CASE("player action bit mapping") {
    CHECK(PlayerAction{0}.class_bit() == 0);
    CHECK(PlayerAction{0}.secret_bit() == 0);
    CHECK(PlayerAction{1}.class_bit() == 1);
    CHECK(PlayerAction{1}.secret_bit() == 0);
    CHECK(PlayerAction{2}.class_bit() == 0);
    CHECK(PlayerAction{2}.secret_bit() == 1);
    CHECK(PlayerAction{3}.class_bit() == 1);
    CHECK(PlayerAction{3}.secret_bit() == 1);
}
