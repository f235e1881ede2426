#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "sqss/analytics.hpp"
#include "sqss/channels.hpp"
#include "sqss/linalg.hpp"
#include "sqss/protocol.hpp"

namespace py = pybind11;
using namespace sqss;

namespace {

using PyMat = std::vector<std::vector<cplx>>;
using PyLinks = std::vector<std::pair<std::string, double>>;

Mat2 mat2_from_py(const PyMat& m) {
    if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) {
        throw std::invalid_argument("expected a 2x2 nested list");
    }
    return Mat2::from_rows(m[0][0], m[0][1], m[1][0], m[1][1]);
}

PyMat mat2_to_py(const Mat2& m) {
    return {{m.at(0, 0), m.at(0, 1)}, {m.at(1, 0), m.at(1, 1)}};
}

PyMat superop_to_py(const Superop& s) {
    PyMat out(4, std::vector<cplx>(4));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = s.at(r, c);
    return out;
}

Superop superop_from_py(const PyMat& m) {
    if (m.size() != 4) throw std::invalid_argument("expected a 4x4 nested list");
    Superop s;
    for (int r = 0; r < 4; ++r) {
        if (m[static_cast<std::size_t>(r)].size() != 4) {
            throw std::invalid_argument("expected a 4x4 nested list");
        }
        for (int c = 0; c < 4; ++c) {
            s.at(r, c) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return s;
}

std::vector<ChannelKind> links_from_py(const PyLinks& links) {
    std::vector<ChannelKind> out;
    out.reserve(links.size());
    for (const auto& [name, param] : links) out.push_back(channel_kind_from_name(name, param));
    return out;
}

ProtocolConfig config_from_py(int players, const std::string& channel, double p,
                              std::int64_t rounds, std::uint64_t seed, double eps_mean,
                              double eps_sigma, const std::optional<PyLinks>& links) {
    ProtocolConfig cfg;
    cfg.n_players = players;
    if (links) {
        cfg.links = links_from_py(*links);
    } else {
        cfg.links.assign(static_cast<std::size_t>(players > 0 ? players : 0),
                         channel_kind_from_name(channel, p));
    }
    cfg.gate_error = GateErrorSpec{eps_mean, eps_sigma};
    cfg.n_rounds = rounds;
    cfg.master_seed = seed;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sequential quantum secret sharing simulation lab (C++ core)";

    // ---- small linear algebra ------------------------------------------
    m.def(
        "vectorize", [](const PyMat& rho) { return vectorize(mat2_from_py(rho)).v; },
        py::arg("rho"), "Row-major stacking of a 2x2 matrix into a length-4 vector.");
    m.def(
        "devectorize",
        [](const std::array<cplx, 4>& v) { return mat2_to_py(devectorize(VecState{v})); },
        py::arg("v"));
    m.def(
        "hs_inner",
        [](const PyMat& a, const PyMat& b) { return hs_inner(mat2_from_py(a), mat2_from_py(b)); },
        py::arg("a"), py::arg("b"), "Hilbert-Schmidt inner product tr(a^dagger b).");
    m.def(
        "x_plus_prob",
        [](const PyMat& rho) { return x_plus_prob(DensityMatrix(mat2_from_py(rho))); },
        py::arg("rho"), "<+|rho|+> for a valid density matrix, clamped to [0, 1].");
    m.def(
        "x_minus_prob",
        [](const PyMat& rho) { return x_minus_prob(DensityMatrix(mat2_from_py(rho))); },
        py::arg("rho"));

    // ---- channels -------------------------------------------------------
    m.def(
        "kraus_ops",
        [](const std::string& channel, double param) {
            const KrausChannel ch = make_channel(channel_kind_from_name(channel, param));
            std::vector<PyMat> ops;
            ops.reserve(ch.ops.size());
            for (const Mat2& op : ch.ops) ops.push_back(mat2_to_py(op));
            return ops;
        },
        py::arg("channel"), py::arg("param"),
        "Kraus operators (prefactors absorbed) of the named channel.");
    m.def(
        "channel_superop",
        [](const std::string& channel, double param) {
            return superop_to_py(to_superop(make_channel(channel_kind_from_name(channel, param))));
        },
        py::arg("channel"), py::arg("param"),
        "4x4 superoperator acting on the vectorized density matrix.");
    m.def(
        "apply_channel",
        [](const std::string& channel, double param, const PyMat& rho) {
            const KrausChannel ch = make_channel(channel_kind_from_name(channel, param));
            return mat2_to_py(apply_kraus(ch, DensityMatrix(mat2_from_py(rho))).mat());
        },
        py::arg("channel"), py::arg("param"), py::arg("rho"));
    m.def(
        "phase_gate_superop", [](int q) { return superop_to_py(phase_gate_superop(q)); },
        py::arg("quarter_turn"));
    m.def(
        "noisy_phase_gate_superop",
        [](int q, double eps) { return superop_to_py(noisy_phase_gate_superop(q, eps)); },
        py::arg("quarter_turn"), py::arg("eps"));
    m.def(
        "compose",
        [](const std::vector<PyMat>& sequence) {
            std::vector<Superop> ops;
            ops.reserve(sequence.size());
            for (const PyMat& s : sequence) ops.push_back(superop_from_py(s));
            return superop_to_py(compose(ops));
        },
        py::arg("sequence"), "Right-to-left product; the first element acts first.");

    // ---- analytics ------------------------------------------------------
    m.def("gate_error_prob", &gate_error_prob, py::arg("n_players"), py::arg("eps_bar"));
    m.def("gate_error_bound", &gate_error_bound, py::arg("n_players"), py::arg("delta"));
    m.def("gate_error_bound_approx", &gate_error_bound_approx, py::arg("n_players"),
          py::arg("delta"));
    m.def("dephasing_error_prob", &dephasing_error_prob, py::arg("n_players"), py::arg("p"));
    m.def(
        "dephasing_error_prob_hetero",
        [](const std::vector<double>& ps) { return dephasing_error_prob_hetero(ps); },
        py::arg("ps"));
    m.def("noise_bound", &noise_bound, py::arg("n_players"), py::arg("delta"));
    m.def("noise_bound_approx", &noise_bound_approx, py::arg("n_players"), py::arg("delta"));
    m.def("bitflip_error_prob", &bitflip_error_prob, py::arg("n_players"), py::arg("p"));
    m.def("phase_flip_error_prob", &phase_flip_error_prob, py::arg("n_players"), py::arg("p"));
    m.def(
        "bitflip_conditional_plus",
        [](const std::vector<int>& quarter_turns, double p) {
            return bitflip_conditional_plus(BitflipTranscript::from_quarter_turns(quarter_turns),
                                            p);
        },
        py::arg("quarter_turns"), py::arg("p"),
        "P(+ | transcript) under bit-flip links; valid rounds only.");
    m.def(
        "bitflip_block_product",
        [](const std::vector<int>& quarter_turns, double p) {
            const BitflipBlockProduct blk =
                bitflip_block_product(BitflipTranscript::from_quarter_turns(quarter_turns), p);
            return py::make_tuple(blk.a_n, blk.b_n, blk.outer);
        },
        py::arg("quarter_turns"), py::arg("p"));
    m.def(
        "exhaustive_error_prob",
        [](int n_players, const std::string& channel, double param, double eps_mean) {
            return exhaustive_error_prob(n_players, channel_kind_from_name(channel, param),
                                         GateErrorSpec{eps_mean, 0.0});
        },
        py::arg("n_players"), py::arg("channel"), py::arg("param"), py::arg("eps_mean") = 0.0,
        "Exact error rate by enumerating all 4^N transcripts (N <= 10).");
    m.def(
        "exhaustive_error_prob_links",
        [](const PyLinks& links, double eps_mean) {
            const std::vector<ChannelKind> kinds = links_from_py(links);
            return exhaustive_error_prob(static_cast<int>(kinds.size()), kinds,
                                         GateErrorSpec{eps_mean, 0.0});
        },
        py::arg("links"), py::arg("eps_mean") = 0.0,
        "Exhaustive oracle with one (channel, param) pair per link.");

    py::class_<Table1Row>(m, "Table1Row")
        .def_readonly("q1", &Table1Row::q1)
        .def_readonly("q2", &Table1Row::q2)
        .def_readonly("coherence", &Table1Row::coherence)
        .def_readonly("p_plus", &Table1Row::p_plus)
        .def_readonly("p_minus", &Table1Row::p_minus)
        .def_readonly("p_error", &Table1Row::p_error)
        .def("__repr__", [](const Table1Row& r) {
            return "Table1Row(q1=" + std::to_string(r.q1) + ", q2=" + std::to_string(r.q2) +
                   ", coherence=" + std::to_string(r.coherence) +
                   ", p_error=" + std::to_string(r.p_error) + ")";
        });
    m.def(
        "table1",
        [](double p) {
            const auto rows = table1(p);
            return std::vector<Table1Row>(rows.begin(), rows.end());
        },
        py::arg("p"), "All 8 valid two-player transcripts under bit-flip links.");

    // ---- protocol -------------------------------------------------------
    py::class_<ErrorEstimate>(m, "ErrorEstimate")
        .def_readonly("n_rounds", &ErrorEstimate::n_rounds)
        .def_readonly("n_valid", &ErrorEstimate::n_valid)
        .def_readonly("n_errors", &ErrorEstimate::n_errors)
        .def_readonly("empirical_rate", &ErrorEstimate::empirical_rate)
        .def_readonly("ci_half_width", &ErrorEstimate::ci_half_width)
        .def_property_readonly(
            "analytic_rate",
            [](const ErrorEstimate& e) -> py::object {
                if (!e.analytic_rate) return py::none();
                return py::float_(*e.analytic_rate);
            })
        .def("__repr__", [](const ErrorEstimate& e) {
            return "ErrorEstimate(n_valid=" + std::to_string(e.n_valid) +
                   ", n_errors=" + std::to_string(e.n_errors) +
                   ", empirical_rate=" + std::to_string(e.empirical_rate) + ")";
        });

    m.def(
        "simulate",
        [](int players, const std::string& channel, double p, std::int64_t rounds,
           std::uint64_t seed, double eps_mean, double eps_sigma,
           const std::optional<PyLinks>& links, int threads) {
            const ProtocolConfig cfg =
                config_from_py(players, channel, p, rounds, seed, eps_mean, eps_sigma, links);
            return run_experiment(cfg, {}, threads);
        },
        py::arg("players"), py::arg("channel") = "noiseless", py::arg("p") = 0.0,
        py::arg("rounds") = 100000, py::arg("seed") = 0, py::arg("eps_mean") = 0.0,
        py::arg("eps_sigma") = 0.0, py::arg("links") = py::none(), py::arg("threads") = 1,
        "Monte Carlo estimate of the key error rate over valid rounds.");
    m.def(
        "run_round",
        [](int players, const std::string& channel, double p, std::uint64_t seed,
           std::int64_t round_index, double eps_mean, double eps_sigma,
           const std::optional<PyLinks>& links) {
            const ProtocolConfig cfg =
                config_from_py(players, channel, p, 1, seed, eps_mean, eps_sigma, links);
            const RoundRecord rec = run_round(cfg, round_index);
            py::dict out;
            std::vector<int> turns;
            turns.reserve(rec.actions.size());
            for (const PlayerAction& a : rec.actions) turns.push_back(a.quarter_turn);
            out["round_index"] = rec.round_index;
            out["quarter_turns"] = turns;
            out["eps_draws"] = rec.eps_draws;
            out["final_state"] = mat2_to_py(rec.final_state.mat());
            out["valid"] = rec.valid;
            out["outcome"] = rec.outcome;
            if (rec.valid) {
                out["ideal_outcome"] = rec.ideal_outcome;
                out["key_shares"] = extract_key_shares(rec).bits;
            } else {
                out["ideal_outcome"] = py::none();
                out["key_shares"] = py::none();
            }
            return out;
        },
        py::arg("players"), py::arg("channel") = "noiseless", py::arg("p") = 0.0,
        py::arg("seed") = 0, py::arg("round_index") = 0, py::arg("eps_mean") = 0.0,
        py::arg("eps_sigma") = 0.0, py::arg("links") = py::none(),
        "Play one protocol round and return its transcript.");
}
