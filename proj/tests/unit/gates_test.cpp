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

#include "postsel/gates.hpp"

#include "gtest/gtest.h"

using namespace postsel;

namespace {

template <typename T>
BellErrorModel<T> ideal_bell(Spectator s) {
    return {CosetErrorModel<T>(s, PauliWeights::unit()), CosetErrorModel<T>(s, PauliWeights::unit())};
}

size_t coset_index(Spectator s, const char *p) {
    return CosetTable::get(s).coset_of[block_code(PauliProduct::from_str(p))];
}

GateErrorSet<double> physical(double pp, double pc) {
    return uniform_physical_set<double>(PhysicalErrorParams::from_prep_cnot(pp, pc));
}

}  // namespace

TEST(gates, zero_error_gives_zero_everywhere) {
    auto g = physical(0, 0);
    for (auto s : {Spectator::Plus, Spectator::Zero}) {
        auto r = level_step(g, s);
        EXPECT_EQ(r.gates.cnot.total(), 0.0);
        EXPECT_EQ(r.gates.hadamard.total(), 0.0);
        EXPECT_EQ(r.gates.prep.total(), 0.0);
        EXPECT_EQ(r.gates.meas.total(), 0.0);
        EXPECT_EQ(r.terminal.total(), 0.0);
        EXPECT_EQ(r.quality_min, 1.0);
        EXPECT_EQ(r.quality_max, 1.0);
    }
}

TEST(gates, prep_flip_from_logical_coset) {
    for (auto s : {Spectator::Zero, Spectator::Plus}) {
        auto bell = ideal_bell<Rational>(s);
        LocationErrorModel<Rational> meas(1);
        Rational a(1, 50);
        bell.origin.likelihoods[coset_index(s, "XXII")] = a;
        EXPECT_EQ(logical_prep_error(bell, meas, Basis::Z0), a);
        EXPECT_EQ(logical_prep_error(bell, meas, Basis::Xplus), Rational(0));
        bell.origin.likelihoods[coset_index(s, "ZIZI")] = 2 * a;
        // XXII is invisible to the X-basis readout and stays in the no-flip outcome.
        EXPECT_EQ(logical_prep_error(bell, meas, Basis::Xplus), 2 * a / (1 + a));
        EXPECT_EQ(logical_meas_error(bell, meas, Basis::Z0), Rational(0));
    }
}

TEST(gates, single_qubit_errors_are_detected_in_prep) {
    auto s = Spectator::Zero;
    auto bell = ideal_bell<Rational>(s);
    bell.origin.likelihoods[coset_index(s, "XIII")] = Rational(1, 10);
    LocationErrorModel<Rational> meas(1);
    EXPECT_EQ(logical_prep_error(bell, meas, Basis::Z0), Rational(0));
    meas.set("X", Rational(1, 20));
    Rational f = logical_prep_error(bell, meas, Basis::Z0);
    EXPECT_GT(f, Rational(0));
    EXPECT_LT(f, Rational(1, 20));
}

TEST(gates, transversal_cnot_x_fault_oracle) {
    Rational a(1, 30);
    LocationErrorModel<Rational> transversal(2);
    transversal.set("XI", a);
    {
        auto m = logical_cnot_error(ideal_bell<Rational>(Spectator::Zero), transversal, nullptr);
        EXPECT_EQ(m.get("XI"), 2 * a * a / (1 + a * a * a * a));
        EXPECT_EQ(m.total(), m.get("XI"));
    }
    {
        auto m = logical_cnot_error(ideal_bell<Rational>(Spectator::Plus), transversal, nullptr);
        EXPECT_EQ(m.get("XI"), 4 * a * a / ((1 + a * a) * (1 + a * a)));
        EXPECT_EQ(m.total(), m.get("XI"));
    }
}

TEST(gates, ideal_teleported_gates_are_error_free) {
    LocationErrorModel<Rational> cnot(2);
    LocationErrorModel<Rational> h(1);
    for (auto s : {Spectator::Zero, Spectator::Plus}) {
        size_t peak = 0;
        EXPECT_EQ(logical_cnot_error(ideal_bell<Rational>(s), cnot, nullptr, &peak).total(), Rational(0));
        EXPECT_LE(peak, 20u);
        EXPECT_EQ(logical_hadamard_error(ideal_bell<Rational>(s), h, nullptr).total(), Rational(0));
    }
}

TEST(gates, level_one_symmetries) {
    auto g = physical(0.01, 0.03);
    for (auto s : {Spectator::Plus, Spectator::Zero}) {
        auto r = level_step(g, s);
        EXPECT_NEAR(r.gates.prep.get("X"), r.gates.meas.get("X"), 1e-12 * r.gates.prep.get("X"));
        EXPECT_NEAR(r.gates.prep.get("Z"), r.gates.meas.get("Z"), 1e-12 * r.gates.prep.get("Z"));
        EXPECT_NEAR(r.gates.hadamard.get("X"), r.gates.hadamard.get("Z"), 1e-12 * r.gates.hadamard.get("X"));
        EXPECT_EQ(r.gates.cnot.entries.size(), 15u);
        EXPECT_LE(r.cnot_peak_qubits, 20u);
        auto m = r.summary().cnot_marginals;
        EXPECT_LT(m.y, m.x);
        EXPECT_LT(m.y, m.z);
    }
}

TEST(gates, scaling_inputs_down_does_not_raise_level_one_errors) {
    for (auto [pp, pc] : {std::pair{0.01, 0.03}, std::pair{0.002, 0.008}}) {
        auto base = level_step(physical(pp, pc), Spectator::Plus).summary();
        for (double alpha : {0.5, 0.25}) {
            auto s = level_step(physical(alpha * pp, alpha * pc), Spectator::Plus).summary();
            EXPECT_LE(s.prep_x, base.prep_x);
            EXPECT_LE(s.prep_z, base.prep_z);
            EXPECT_LE(s.cnot_total, base.cnot_total);
            EXPECT_LE(s.hadamard_total, base.hadamard_total);
        }
    }
}

TEST(gates, level_two_uses_error_free_bell_measurements) {
    auto g = physical(0.002, 0.008);
    auto l1 = level_step(g, Spectator::Plus);
    auto l2 = level_step(l1.gates, Spectator::Zero);
    EXPECT_EQ(l2.level, 2);
    EXPECT_EQ(l2.gates.level, 2);
    auto direct = logical_cnot_error(l2.bell, l1.gates.cnot, nullptr);
    for (const auto &[p, e] : direct.entries) {
        EXPECT_EQ(l2.gates.cnot.get(p), e);
    }
    EXPECT_LT(l2.summary().max_gate_error(), l1.summary().max_gate_error());
}

TEST(gates, summary_probabilities_from_likelihoods) {
    GateErrorSet<double> g;
    g.prep.set("X", 0.25);
    g.cnot.set("XX", 0.5);
    g.hadamard.set("Y", 1.0);
    auto s = summarize(g);
    EXPECT_DOUBLE_EQ(s.prep_x, 0.2);
    EXPECT_DOUBLE_EQ(s.cnot_total, 1.0 / 3);
    EXPECT_DOUBLE_EQ(s.cnot_marginals.x, 1.0 / 3);
    EXPECT_DOUBLE_EQ(s.hadamard_y, 0.5);
    EXPECT_DOUBLE_EQ(s.max_gate_error(), 0.5);
}

TEST(gates, report_json_layout) {
    auto r = level_step(physical(0.002, 0.008), Spectator::Plus);
    auto j = level_report_to_json(r);
    EXPECT_EQ(j["level"], 1);
    EXPECT_EQ(j["spectator"], "plus");
    EXPECT_EQ(j["purification_order_masses"].size(), 2u);
    EXPECT_EQ(j["gates"]["cnot"].size(), 15u);
    EXPECT_EQ(j["terminal"]["cosets"].size(), 32u);
}
