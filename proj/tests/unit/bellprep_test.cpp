// Copyright 2026 The postsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "postsel/bellprep.hpp"

#include "gtest/gtest.h"

using namespace postsel;

namespace {

GateErrorSet<double> zero_set() {
    return uniform_physical_set<double>(PhysicalErrorParams::from_prep_cnot(0, 0));
}

template <typename T>
bool is_delta(const std::vector<T> &d) {
    if (!(d[0] == T(1))) {
        return false;
    }
    for (size_t k = 1; k < d.size(); k++) {
        if (!is_zero(d[k])) {
            return false;
        }
    }
    return true;
}

uint32_t syndrome_of(const PauliProduct &p, const std::vector<PauliProduct> &gens) {
    uint32_t s = 0;
    for (size_t i = 0; i < gens.size(); i++) {
        if (!commutes(p, gens[i])) {
            s |= 1u << i;
        }
    }
    return s;
}

std::vector<int> brute_min_weights(Spectator sp) {
    auto gens = bell_generators(sp);
    std::vector<int> mw(256, 99);
    for (uint32_t x = 0; x < 256; x++) {
        for (uint32_t z = 0; z < 256; z++) {
            PauliProduct p(8, x, z);
            uint32_t s = syndrome_of(p, gens);
            mw[s] = std::min(mw[s], (int)p.weight());
        }
    }
    return mw;
}

}  // namespace

TEST(bellprep, encoder_output_matches_code) {
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        const auto &net = synthesize_encoding_network(sp);
        ASSERT_TRUE(detail::encoder_is_valid(net));
        LabeledState<double> ws;
        ws.add(0, Basis::Xplus);
        ws.add(8, Basis::Z0);
        ws.cnot(0, 8);
        encode_block<double>(ws, net, {0, 1, 2, 3}, nullptr);
        std::array<int, 4> block{8, 9, 10, 11};
        encode_block<double>(ws, net, block, nullptr);
        // Reorder labels into positions 0..7 by reading generators through labels.
        std::vector<PauliProduct> expected;
        for (const auto &g : bell_generators(sp)) {
            std::vector<std::pair<int, char>> f;
            for (uint32_t q = 0; q < 8; q++) {
                uint8_t c = g.get(q);
                if (c) {
                    f.emplace_back(q < 4 ? (int)q : (int)q + 4, "IXZY"[c]);
                }
            }
            expected.push_back(ws.pauli(f));
        }
        ASSERT_TRUE(detail::same_span(ws.state.gens.rows, expected)) << spectator_name(sp);
        ws.state.rebase(expected);
        ASSERT_TRUE(is_delta(ws.state.dist));
    }
}

TEST(bellprep, spectator_rows) {
    auto z = bell_generators(Spectator::Zero);
    EXPECT_EQ(z[2].str(), "IIZZIIII");
    EXPECT_EQ(z[5].str(), "IIIIIIZZ");
    auto p = bell_generators(Spectator::Plus);
    EXPECT_EQ(p[2].str(), "IXIXIIII");
    EXPECT_EQ(p[5].str(), "IIIIIXIX");
    EXPECT_EQ(p[6].str(), "XXIIXXII");
    EXPECT_EQ(p[7].str(), "ZIZIZIZI");
    EXPECT_NO_THROW(GeneratorMatrix(8, p).validate());
}

TEST(bellprep, network_is_minimal_and_stable) {
    const auto &a = synthesize_encoding_network(Spectator::Zero);
    const auto &b = synthesize_encoding_network(Spectator::Plus);
    EXPECT_EQ(a.cnots.size(), 3u);
    EXPECT_EQ(b.cnots.size(), 3u);
    EXPECT_EQ(a.fingerprint(), detail::search_encoder(Spectator::Zero).fingerprint());
    EXPECT_NE(a.fingerprint(), b.fingerprint());
    // No two-cnot encoder exists.
    EncodingNetwork trial = a;
    for (uint32_t c1 = 0; c1 < 4; c1++) {
        for (uint32_t t1 = 0; t1 < 4; t1++) {
            for (uint32_t c2 = 0; c2 < 4; c2++) {
                for (uint32_t t2 = 0; t2 < 4; t2++) {
                    if (c1 == t1 || c2 == t2) {
                        continue;
                    }
                    trial.cnots = {{c1, t1}, {c2, t2}};
                    EXPECT_FALSE(detail::encoder_is_valid(trial));
                }
            }
        }
    }
}

TEST(bellprep, zero_error_is_delta) {
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        auto g = zero_set();
        auto raw = prepare_noisy_bell(g, sp);
        ASSERT_TRUE(is_delta(raw.dist));
        ASSERT_TRUE(is_delta(purify_once(raw, raw, PurifyKind::Ztype, g).dist));
        ASSERT_TRUE(is_delta(purify_once(raw, raw, PurifyKind::Xtype, g).dist));
        auto m = compute_bell_model(g, sp);
        ASSERT_TRUE(is_delta(m.dist));
    }
}

TEST(bellprep, single_cnot_fault_propagation) {
    // Only the physical Bell cnot is noisy, with {XI: e}. The resulting syndrome is
    // found by pushing X on the control wire through the two encoders by conjugation.
    const double e = 0.125;
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        const auto &net = synthesize_encoding_network(sp);
        LabeledState<double> ws;
        for (int label = 0; label < 8; label++) {
            uint32_t pos = (uint32_t)label % 4;
            ws.add(label, pos == net.data ? (label < 4 ? Basis::Xplus : Basis::Z0) : net.prep[pos]);
        }
        ws.cnot((int)net.data, 4 + (int)net.data);
        LocationErrorModel<double> m(2);
        m.set("XI", e);
        ws.error(m, {(int)net.data, 4 + (int)net.data});
        for (int b = 0; b < 2; b++) {
            for (auto [c, t] : net.cnots) {
                ws.cnot(4 * b + (int)c, 4 * b + (int)t);
            }
        }
        auto gens = bell_generators(sp);
        ws.state.rebase(gens);

        PauliProduct err = PauliProduct::x(8, net.data);
        for (auto [c, t] : net.cnots) {
            err = conjugate_by_gate(err, Gate::cnot(c, t)).pauli;
        }
        uint32_t expect = syndrome_of(err, gens);
        ASSERT_NE(expect, 0u);
        for (uint32_t s = 0; s < 256; s++) {
            EXPECT_DOUBLE_EQ(ws.state.dist[s], s == 0 ? 1.0 : (s == expect ? e : 0.0)) << s;
        }
    }
}

TEST(bellprep, raw_pair_lowest_degree_bounded_by_pauli_weight) {
    // Before purification a single fault can produce a weight-2 Pauli, so the lowest
    // degree is only bounded by the minimum weight.
    PolyScope scope(3, 1.0 / 400);
    auto e = TruncatedPoly::monomial(1, 1);
    GateErrorSet<TruncatedPoly> g;
    g.prep.set("X", e);
    g.prep.set("Z", e);
    g.meas.set("X", e);
    g.meas.set("Z", e);
    for (const auto &p : two_qubit_paulis()) {
        g.cnot.set(p, e);
    }
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        auto mw = brute_min_weights(sp);
        auto raw = prepare_noisy_bell(g, sp);
        for (uint32_t s = 1; s < 256; s++) {
            if (!raw.dist[s].is_zero()) {
                EXPECT_GE(raw.dist[s].min_degree(), 1);
                EXPECT_LE(raw.dist[s].min_degree(), mw[s]);
            }
        }
    }
}

TEST(bellprep, purification_detects_bit_flip) {
    auto gens = bell_generators(Spectator::Zero);
    auto g = zero_set();
    auto ideal = prepare_noisy_bell(g, Spectator::Zero);
    const double a = 0.2;

    // X on qubit 0 of the kept pair: detected by a Z-type step.
    uint32_t sx = syndrome_of(PauliProduct::x(8, 0), gens);
    // Z on qubit 0: invisible to a Z-type step, detected by an X-type step.
    uint32_t sz = syndrome_of(PauliProduct::z(8, 0), gens);
    auto kept = ideal;
    kept.dist[sx] = a;
    kept.dist[sz] = a;

    auto zs = purify_once(kept, ideal, PurifyKind::Ztype, g);
    EXPECT_EQ(zs.dist[sx], 0);
    EXPECT_EQ(zs.dist[sz], a);
    EXPECT_EQ(zs.dist[0], 1);

    auto xs = purify_once(kept, ideal, PurifyKind::Xtype, g);
    EXPECT_EQ(xs.dist[sx], a);
    EXPECT_EQ(xs.dist[sz], 0);
}

TEST(bellprep, acceptance_at_most_one) {
    auto g = uniform_physical_set<double>(PhysicalErrorParams::from_prep_cnot(0.01, 0.03));
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        auto raw = prepare_noisy_bell(g, sp);
        for (auto kind : {PurifyKind::Ztype, PurifyKind::Xtype}) {
            auto out = purify_once(raw, raw, kind, g);
            // Inputs carry the no-fault reference weight 1, so masses are relative to it.
            double in = raw.total_mass() * raw.total_mass();
            double n_locations_factor = 1;
            for (int k = 0; k < 8; k++) {
                n_locations_factor *= (1 + g.cnot.total()) * (1 + g.meas.get("X"));
            }
            double ratio = out.total_mass() / (in * n_locations_factor);
            EXPECT_GT(ratio, 0);
            EXPECT_LE(ratio, 1);
        }
    }
}

TEST(bellprep, spectator_mismatch_rejected) {
    auto g = zero_set();
    auto a = prepare_noisy_bell(g, Spectator::Zero);
    auto b = prepare_noisy_bell(g, Spectator::Plus);
    EXPECT_THROW(purify_once(a, b, PurifyKind::Ztype, g), std::invalid_argument);
}

TEST(bellprep, symmetrized_model_block_marginals_agree) {
    auto g = uniform_physical_set<double>(PhysicalErrorParams::from_prep_cnot(0.01, 0.03));
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        auto m = compute_bell_model(g, sp);
        EXPECT_DOUBLE_EQ(m.dist[0], 1);
        std::array<double, 8> origin{};
        std::array<double, 8> dest{};
        for (uint32_t s = 0; s < 256; s++) {
            origin[s & 7] += m.dist[s];
            dest[(s >> 3) & 7] += m.dist[s];
            EXPECT_NEAR(m.dist[s], m.dist[swap_blocks_syndrome(s)], 1e-15 * (1 + m.dist[s]));
        }
        for (int k = 0; k < 8; k++) {
            EXPECT_NEAR(origin[k], dest[k], 1e-14);
        }
    }
}

TEST(bellprep, formal_two_cycle_degrees_equal_min_weight) {
    PolyScope scope(4, 1e-4);
    auto e = TruncatedPoly::monomial(1, 1);
    GateErrorSet<TruncatedPoly> g;
    g.prep.set("X", e);
    g.prep.set("Z", e);
    g.meas.set("X", e);
    g.meas.set("Z", e);
    for (const auto &p : two_qubit_paulis()) {
        g.cnot.set(p, e);
    }
    for (auto sp : {Spectator::Zero, Spectator::Plus}) {
        auto mw = brute_min_weights(sp);
        auto m = compute_bell_model(g, sp);
        for (uint32_t s = 0; s < 256; s++) {
            EXPECT_EQ(m.dist[s].min_degree(), std::min(mw[s], 5)) << "syndrome " << s;
        }
    }
}

TEST(bellprep, json_has_256_records) {
    auto m = compute_bell_model(zero_set(), Spectator::Plus);
    auto j = bell_model_to_json(m);
    EXPECT_EQ(j["syndromes"].size(), 256u);
    EXPECT_EQ(j["syndromes"][0]["syndrome"], "00000000");
    EXPECT_EQ(j["network_hash"].get<uint64_t>(), m.network_fingerprint);
}
