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

#ifndef POSTSEL_GATES_HPP
#define POSTSEL_GATES_HPP

#include <algorithm>
#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "postsel/bellprep.hpp"
#include "postsel/indfit.hpp"

namespace postsel {

/// Logical one-qubit error, as likelihoods relative to no error.
template <typename T>
struct LocalQubitError {
    T e_x = T(0);
    T e_z = T(0);
    T e_y = T(0);

    T total() const {
        return e_x + e_z + e_y;
    }
    double total_probability() const {
        T t = total();
        return to_double(t / (T(1) + t));
    }
    LocationErrorModel<T> location() const {
        LocationErrorModel<T> out(1);
        out.set("X", e_x);
        out.set("Z", e_z);
        out.set("Y", e_y);
        return out;
    }
    static LocalQubitError from_location(const LocationErrorModel<T> &m) {
        if (m.arity != 1) {
            throw std::invalid_argument("LocalQubitError needs an arity-1 model.");
        }
        return {m.get("X"), m.get("Z"), m.get("Y")};
    }
};

/// Adds an ideal encoded block on `block` whose logical qubit forms a Bell pair with `ref`.
template <typename T>
void add_block_with_reference(LabeledState<T> &ws, const EncodingNetwork &net, int ref, const std::array<int, 4> &block) {
    ws.add(ref, Basis::Xplus);
    ws.add(block[net.data], Basis::Z0);
    ws.cnot(ref, block[net.data]);
    encode_block<T>(ws, net, block, nullptr);
}

namespace detail {

inline std::array<int, 4> block_labels(int first) {
    return {first, first + 1, first + 2, first + 3};
}

/// Likelihood of every Pauli on `targets` relative to the ideal frame `gens`, after
/// rebasing the remaining state onto that frame.
template <typename T>
LocationErrorModel<T> reference_errors(LabeledState<T> &ws, const std::vector<PauliProduct> &gens,
                                       const std::vector<int> &targets) {
    ws.state.rebase(gens);
    const T &d0 = ws.state.dist[0];
    if (is_zero(d0)) {
        throw ZeroAcceptanceError("Postselection removed the error-free outcome.");
    }
    LocationErrorModel<T> out((uint32_t)targets.size());
    uint32_t k = (uint32_t)targets.size();
    for (uint64_t x = 0; x < (uint64_t{1} << k); x++) {
        for (uint64_t z = 0; z < (uint64_t{1} << k); z++) {
            if ((x | z) == 0) {
                continue;
            }
            std::vector<std::pair<int, char>> f;
            for (uint32_t i = 0; i < k; i++) {
                bool bx = (x >> i) & 1;
                bool bz = (z >> i) & 1;
                if (bx || bz) {
                    f.emplace_back(targets[i], bx && bz ? 'Y' : (bx ? 'X' : 'Z'));
                }
            }
            PauliProduct err = ws.pauli(f);
            uint32_t syn = 0;
            for (size_t g = 0; g < gens.size(); g++) {
                if (!commutes(err, gens[g])) {
                    syn |= 1u << g;
                }
            }
            out.set(PauliProduct(k, x, z), ws.state.dist[syn] / d0);
        }
    }
    return out;
}

/// Transversal Bell measurement of `src` against `dst`, position i against perm[i].
template <typename T>
void bell_measure(LabeledState<T> &ws, const std::array<int, 4> &src, const std::array<int, 4> &dst,
                  const std::array<int, 4> &perm, const GateErrorSet<T> *noise) {
    for (int i = 3; i >= 0; i--) {
        int a = src[i];
        int b = dst[perm[i]];
        ws.cnot(a, b);
        if (noise) {
            ws.error(noise->cnot, {a, b});
            ws.error(noise->meas_for(Basis::Xplus), {a});
            ws.error(noise->meas_for(Basis::Z0), {b});
        }
        ws.project(a, Basis::Xplus);
        ws.project(b, Basis::Z0);
    }
}

constexpr std::array<int, 4> IDENTITY_PERM{0, 1, 2, 3};
constexpr std::array<int, 4> SWAP_MIDDLE_PERM{0, 2, 1, 3};

}  // namespace detail

/// Flip likelihood of a logical preparation in basis b, made by measuring one block
/// of a Bell pair. `block` is the coset model carried by the measured block.
template <typename T>
T logical_flip_likelihood(const CosetErrorModel<T> &block, const LocationErrorModel<T> &meas_model, Basis b) {
    const auto &net = synthesize_encoding_network(block.spectator);
    LabeledState<T> ws;
    const int ref = 100;
    auto blk = detail::block_labels(0);
    add_block_with_reference(ws, net, ref, blk);
    ws.error(block.location(), {blk[0], blk[1], blk[2], blk[3]});
    auto flip = meas_model.only(b == Basis::Z0 ? "X" : "Z");
    for (int q : blk) {
        ws.error(flip, {q});
        ws.project(q, b);
    }
    PauliProduct target = ws.pauli({{ref, b == Basis::Z0 ? 'Z' : 'X'}});
    auto errs = detail::reference_errors(ws, {target}, {ref});
    return errs.get(b == Basis::Z0 ? "X" : "Z");
}

template <typename T>
T logical_prep_error(const BellErrorModel<T> &bell, const LocationErrorModel<T> &meas_model, Basis b) {
    return logical_flip_likelihood(bell.origin, meas_model, b);
}

template <typename T>
T logical_meas_error(const BellErrorModel<T> &bell, const LocationErrorModel<T> &meas_model, Basis b) {
    return logical_flip_likelihood(bell.destination, meas_model, b);
}

/// Two-qubit logical error of a teleported cnot. `transversal` acts after each
/// transversal pair; `bell_noise` (null for ideal) covers the Bell measurements.
template <typename T>
LocationErrorModel<T> logical_cnot_error(const BellErrorModel<T> &bell, const LocationErrorModel<T> &transversal,
                                         const std::type_identity_t<GateErrorSet<T>> *bell_noise, size_t *peak_qubits = nullptr) {
    if (transversal.arity != 2) {
        throw std::invalid_argument("Transversal cnot model must have arity 2.");
    }
    const auto &net = synthesize_encoding_network(bell.origin.spectator);
    enum : int { R1 = 100, R2 = 101, D1 = 102, D2 = 103 };
    auto b1 = detail::block_labels(0);
    auto b2 = detail::block_labels(4);
    auto o1 = detail::block_labels(8);
    auto o2 = detail::block_labels(12);
    auto dest = bell.destination.location();
    auto orig = bell.origin.location();

    LabeledState<T> ws;
    add_block_with_reference(ws, net, R1, b1);
    ws.error(dest, {b1[0], b1[1], b1[2], b1[3]});
    add_block_with_reference(ws, net, R2, b2);
    ws.error(dest, {b2[0], b2[1], b2[2], b2[3]});
    for (int i = 0; i < 4; i++) {
        ws.cnot(b1[i], b2[i]);
        ws.error(transversal, {b1[i], b2[i]});
    }
    add_block_with_reference(ws, net, D1, o1);
    ws.error(orig, {o1[0], o1[1], o1[2], o1[3]});
    detail::bell_measure(ws, b1, o1, detail::IDENTITY_PERM, bell_noise);
    add_block_with_reference(ws, net, D2, o2);
    ws.error(orig, {o2[0], o2[1], o2[2], o2[3]});
    detail::bell_measure(ws, b2, o2, detail::IDENTITY_PERM, bell_noise);

    std::vector<PauliProduct> ideal{
        ws.pauli({{R1, 'X'}, {D1, 'X'}, {D2, 'X'}}),
        ws.pauli({{R1, 'Z'}, {D1, 'Z'}}),
        ws.pauli({{R2, 'X'}, {D2, 'X'}}),
        ws.pauli({{R2, 'Z'}, {D1, 'Z'}, {D2, 'Z'}}),
    };
    if (peak_qubits) {
        *peak_qubits = ws.peak_qubits;
    }
    return detail::reference_errors(ws, ideal, {D1, D2});
}

/// One-qubit logical error of a teleported Hadamard.
template <typename T>
LocalQubitError<T> logical_hadamard_error(const BellErrorModel<T> &bell, const LocationErrorModel<T> &hadamard_model,
                                          const std::type_identity_t<GateErrorSet<T>> *bell_noise) {
    if (hadamard_model.arity != 1) {
        throw std::invalid_argument("Hadamard model must have arity 1.");
    }
    const auto &net = synthesize_encoding_network(bell.origin.spectator);
    enum : int { R = 100, D = 101 };
    auto b = detail::block_labels(0);
    auto o = detail::block_labels(4);

    LabeledState<T> ws;
    add_block_with_reference(ws, net, R, b);
    ws.error(bell.destination.location(), {b[0], b[1], b[2], b[3]});
    for (int q : b) {
        ws.hadamard(q);
        ws.error(hadamard_model, {q});
    }
    add_block_with_reference(ws, net, D, o);
    ws.error(bell.origin.location(), {o[0], o[1], o[2], o[3]});
    detail::bell_measure(ws, b, o, detail::SWAP_MIDDLE_PERM, bell_noise);

    std::vector<PauliProduct> ideal{ws.pauli({{R, 'X'}, {D, 'Z'}}), ws.pauli({{R, 'Z'}, {D, 'X'}})};
    return LocalQubitError<T>::from_location(detail::reference_errors(ws, ideal, {D}));
}

/// Per-Pauli marginal likelihoods of a two-qubit model, each slot normalized so its
/// identity marginal is 1, maximized over the two slots.
template <OrderedScalar T>
PauliTriple<T> normalized_cnot_marginals(const LocationErrorModel<T> &cnot) {
    std::array<std::array<T, 4>, 2> m{};
    for (auto &slot : m) {
        slot.fill(T(0));
        slot[0] = T(1);
    }
    for (const auto &[p, e] : cnot.entries) {
        for (uint32_t s = 0; s < 2; s++) {
            m[s][p.get(s)] += e;
        }
    }
    auto pick = [&](int k) {
        T a = m[0][k] / m[0][0];
        T b = m[1][k] / m[1][0];
        return a < b ? b : a;
    };
    return {pick(1), pick(2), pick(3)};
}

/// Max-slot marginal probabilities of a two-qubit model.
template <OrderedScalar T>
PauliTriple<double> cnot_marginal_probabilities(const LocationErrorModel<T> &cnot) {
    auto m = cnot_marginals(cnot);
    T norm = T(1) + cnot.total();
    return {to_double(m.x / norm), to_double(m.z / norm), to_double(m.y / norm)};
}

inline double probability_of(double e) {
    return e / (1 + e);
}

struct GateSummary {
    double prep_x = 0;
    double prep_z = 0;
    double meas_x = 0;
    double meas_z = 0;
    PauliTriple<double> cnot_marginals;
    double cnot_total = 0;
    double hadamard_x = 0;
    double hadamard_z = 0;
    double hadamard_y = 0;
    double hadamard_total = 0;

    double max_gate_error() const {
        return std::max({prep_x, prep_z, meas_x, meas_z, cnot_total, hadamard_total});
    }
};

template <OrderedScalar T>
GateSummary summarize(const GateErrorSet<T> &g) {
    GateSummary s;
    s.prep_x = to_double(probability_from_likelihood(g.prep.get("X")));
    s.prep_z = to_double(probability_from_likelihood(g.prep.get("Z")));
    s.meas_x = to_double(probability_from_likelihood(g.meas.get("X")));
    s.meas_z = to_double(probability_from_likelihood(g.meas.get("Z")));
    s.cnot_marginals = cnot_marginal_probabilities(g.cnot);
    s.cnot_total = to_double(probability_from_likelihood(g.cnot.total()));
    T hnorm = T(1) + g.hadamard.total();
    s.hadamard_x = to_double(g.hadamard.get("X") / hnorm);
    s.hadamard_z = to_double(g.hadamard.get("Z") / hnorm);
    s.hadamard_y = to_double(g.hadamard.get("Y") / hnorm);
    s.hadamard_total = to_double(g.hadamard.total() / hnorm);
    return s;
}

template <typename T>
struct LevelReport {
    int level = 0;
    Spectator spectator = Spectator::Zero;
    GateErrorSet<T> gates;
    CosetErrorModel<T> terminal;
    BellErrorModel<T> bell;
    double quality_min = 1;
    double quality_max = 1;
    std::vector<OrderMasses> order_masses;
    uint64_t network_fingerprint = 0;
    size_t cnot_peak_qubits = 0;

    GateSummary summary() const {
        return summarize(gates);
    }
};

/// One level of the recursion: Bell model from the previous level's gates, independent
/// fit, then the logical gate models of this level.
template <OrderedScalar T>
LevelReport<T> level_step(const GateErrorSet<T> &prev, Spectator spectator, BellSchedule sched = {},
                          TiePolicy ties = TiePolicy::Proportional) {
    LevelReport<T> out;
    out.level = prev.level + 1;
    out.spectator = spectator;

    auto computed = compute_bell_model(prev, spectator, sched);
    out.order_masses = computed.order_masses;
    out.network_fingerprint = computed.network_fingerprint;
    PauliWeights w = weights_from_marginals(normalized_cnot_marginals(prev.cnot));
    out.bell = fit_bell_model(computed, w, ties);
    out.quality_min = out.bell.quality_min;
    out.quality_max = out.bell.quality_max;
    out.terminal = out.bell.destination;

    const GateErrorSet<T> *bell_noise = prev.level == 0 ? &prev : nullptr;
    GateErrorSet<T> &g = out.gates;
    g.level = out.level;
    g.prep.set("X", logical_prep_error(out.bell, prev.meas, Basis::Z0));
    g.prep.set("Z", logical_prep_error(out.bell, prev.meas, Basis::Xplus));
    g.meas.set("X", logical_meas_error(out.bell, prev.meas, Basis::Z0));
    g.meas.set("Z", logical_meas_error(out.bell, prev.meas, Basis::Xplus));
    g.cnot = logical_cnot_error(out.bell, prev.cnot, bell_noise, &out.cnot_peak_qubits);
    g.hadamard = logical_hadamard_error(out.bell, prev.hadamard, bell_noise).location();
    g.special = prev.special;
    return out;
}

template <OrderedScalar T>
nlohmann::ordered_json summary_to_json(const GateSummary &s) {
    return {{"prep_meas", {{"X", s.prep_x}, {"Z", s.prep_z}}},
            {"meas", {{"X", s.meas_x}, {"Z", s.meas_z}}},
            {"cnot", {{"X", s.cnot_marginals.x}, {"Z", s.cnot_marginals.z}, {"Y", s.cnot_marginals.y}, {"total", s.cnot_total}}},
            {"hadamard", {{"X", s.hadamard_x}, {"Z", s.hadamard_z}, {"Y", s.hadamard_y}, {"total", s.hadamard_total}}},
            {"max_gate_error", s.max_gate_error()}};
}

template <OrderedScalar T>
nlohmann::ordered_json level_report_to_json(const LevelReport<T> &r) {
    nlohmann::ordered_json masses = nlohmann::ordered_json::array();
    for (const auto &m : r.order_masses) {
        masses.push_back({{"cycle", m.cycle}, {"z_then_x", m.z_then_x}, {"x_then_z", m.x_then_z}});
    }
    return {{"level", r.level},
            {"spectator", spectator_name(r.spectator)},
            {"network_hash", r.network_fingerprint},
            {"quality_min", r.quality_min},
            {"quality_max", r.quality_max},
            {"purification_order_masses", masses},
            {"summary", summary_to_json<T>(r.summary())},
            {"gates", gate_set_to_json(r.gates)},
            {"terminal", coset_model_to_json(r.terminal)}};
}

}  // namespace postsel

#endif
