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

#ifndef POSTSEL_BELLPREP_HPP
#define POSTSEL_BELLPREP_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "postsel/error_models.hpp"
#include "postsel/likelihood.hpp"

namespace postsel {

/// Encoder for one four-qubit block: the logical input sits at position `data`,
/// the other positions start in `prep[q]`, then `cnots` run in order.
struct EncodingNetwork {
    Spectator spectator = Spectator::Zero;
    uint32_t data = 0;
    std::array<Basis, 4> prep{};
    std::vector<std::pair<uint32_t, uint32_t>> cnots;

    std::string describe() const {
        std::ostringstream out;
        out << "spectator=" << spectator_name(spectator) << " data=" << data << " prep=";
        for (uint32_t q = 0; q < 4; q++) {
            out << (q == data ? 'D' : (prep[q] == Basis::Z0 ? '0' : '+'));
        }
        out << " cnots=";
        for (size_t k = 0; k < cnots.size(); k++) {
            out << (k ? "," : "") << cnots[k].first << ">" << cnots[k].second;
        }
        return out.str();
    }

    /// FNV-1a hash of describe(), used as a stable network identifier.
    uint64_t fingerprint() const {
        uint64_t h = 1469598103934665603ull;
        for (char c : describe()) {
            h ^= (uint8_t)c;
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Generators of the encoded Bell pair, in the fixed frame used for all Bell models.
inline std::vector<PauliProduct> bell_generators(Spectator s) {
    const char *spec1 = s == Spectator::Zero ? "IIZZIIII" : "IXIXIIII";
    const char *spec2 = s == Spectator::Zero ? "IIIIIIZZ" : "IIIIIXIX";
    std::vector<PauliProduct> out;
    for (const char *t : {"XXXXIIII", "ZZZZIIII", spec1, "IIIIXXXX", "IIIIZZZZ", spec2, "XXIIXXII", "ZIZIZIZI"}) {
        out.push_back(PauliProduct::from_str(t));
    }
    return out;
}

namespace detail {

inline bool same_span(const std::vector<PauliProduct> &a, const std::vector<PauliProduct> &b) {
    Gf2Span sa;
    Gf2Span both;
    for (const auto &p : a) {
        sa.insert(p);
        both.insert(p);
    }
    for (const auto &p : b) {
        both.insert(p);
    }
    return sa.rank() == both.rank() && sa.rank() == b.size();
}

inline bool equivalent_mod(const PauliProduct &p, const PauliProduct &target, const std::array<PauliProduct, 3> &stab) {
    Gf2Span span;
    for (const auto &g : stab) {
        span.insert(g);
    }
    uint64_t ignored = 0;
    return span.express(multiply(p, target).pauli, &ignored);
}

/// Checks the symplectic action of a candidate encoder against the code.
inline bool encoder_is_valid(const EncodingNetwork &net) {
    std::array<PauliProduct, 4> xs;
    std::array<PauliProduct, 4> zs;
    for (uint32_t q = 0; q < 4; q++) {
        xs[q] = PauliProduct::x(4, q);
        zs[q] = PauliProduct::z(4, q);
    }
    for (auto [c, t] : net.cnots) {
        for (uint32_t q = 0; q < 4; q++) {
            xs[q] = conjugate_by_gate(xs[q], Gate::cnot(c, t)).pauli;
            zs[q] = conjugate_by_gate(zs[q], Gate::cnot(c, t)).pauli;
        }
    }
    auto stab = block_stabilizer(net.spectator);
    std::vector<PauliProduct> images;
    for (uint32_t q = 0; q < 4; q++) {
        if (q != net.data) {
            images.push_back(net.prep[q] == Basis::Z0 ? zs[q] : xs[q]);
        }
    }
    if (!same_span(images, {stab.begin(), stab.end()})) {
        return false;
    }
    return equivalent_mod(xs[net.data], logical_x(), stab) && equivalent_mod(zs[net.data], logical_z(), stab);
}

inline EncodingNetwork search_encoder(Spectator s) {
    const uint32_t data = 0;
    const uint32_t plus_count = s == Spectator::Zero ? 1 : 2;
    std::vector<std::pair<uint32_t, uint32_t>> moves;
    for (uint32_t c = 0; c < 4; c++) {
        for (uint32_t t = 0; t < 4; t++) {
            if (c != t) {
                moves.emplace_back(c, t);
            }
        }
    }
    for (size_t len = 0; len <= 6; len++) {
        for (uint32_t mask = 0; mask < 8; mask++) {
            if ((uint32_t)std::popcount(mask) != plus_count) {
                continue;
            }
            EncodingNetwork net;
            net.spectator = s;
            net.data = data;
            for (uint32_t q = 1; q < 4; q++) {
                net.prep[q] = ((mask >> (q - 1)) & 1) ? Basis::Xplus : Basis::Z0;
            }
            std::vector<size_t> idx(len, 0);
            while (true) {
                net.cnots.clear();
                for (size_t k : idx) {
                    net.cnots.push_back(moves[k]);
                }
                if (encoder_is_valid(net)) {
                    return net;
                }
                size_t k = 0;
                while (k < len && ++idx[k] == moves.size()) {
                    idx[k] = 0;
                    k++;
                }
                if (k == len) {
                    break;
                }
            }
        }
    }
    throw std::logic_error("Encoder synthesis failed.");
}

}  // namespace detail

/// Shortest cnot-only encoder for the block code, found by exhaustive search in a fixed order.
inline const EncodingNetwork &synthesize_encoding_network(Spectator s) {
    static const EncodingNetwork zero = detail::search_encoder(Spectator::Zero);
    static const EncodingNetwork plus = detail::search_encoder(Spectator::Plus);
    return s == Spectator::Zero ? zero : plus;
}

/// Adds an encoded block on labels block[0..3] whose logical input is the qubit
/// already living at label block[net.data]. With `gates` null the encoder is ideal.
template <typename T>
void encode_block(LabeledState<T> &ws, const EncodingNetwork &net, const std::array<int, 4> &block,
                  const GateErrorSet<T> *gates) {
    for (uint32_t q = 0; q < 4; q++) {
        if (q == net.data) {
            continue;
        }
        ws.add(block[q], net.prep[q]);
        if (gates) {
            ws.error(gates->prep_for(net.prep[q]), {block[q]});
        }
    }
    for (auto [c, t] : net.cnots) {
        ws.cnot(block[c], block[t]);
        if (gates) {
            ws.error(gates->cnot, {block[c], block[t]});
        }
    }
}

/// Runs the encoder backwards and measures the non-data positions in their prep bases.
template <typename T>
void decode_block(LabeledState<T> &ws, const EncodingNetwork &net, const std::array<int, 4> &block,
                  const GateErrorSet<T> *gates) {
    for (auto it = net.cnots.rbegin(); it != net.cnots.rend(); ++it) {
        ws.cnot(block[it->first], block[it->second]);
        if (gates) {
            ws.error(gates->cnot, {block[it->first], block[it->second]});
        }
    }
    for (uint32_t q = 0; q < 4; q++) {
        if (q == net.data) {
            continue;
        }
        if (gates) {
            ws.error(gates->meas_for(net.prep[q]), {block[q]});
        }
        ws.project(block[q], net.prep[q]);
    }
}

/// Noisy encoded Bell pair on 8 qubits, expressed over bell_generators(s).
template <typename T>
NoisyState<T> prepare_noisy_bell(const GateErrorSet<T> &gates, Spectator s) {
    const auto &net = synthesize_encoding_network(s);
    LabeledState<T> ws;
    const int d1 = (int)net.data;
    const int d2 = 4 + (int)net.data;
    for (int label = 0; label < 8; label++) {
        uint32_t pos = (uint32_t)label % 4;
        Basis b = pos == net.data ? (label < 4 ? Basis::Xplus : Basis::Z0) : net.prep[pos];
        ws.add(label, b);
        ws.error(gates.prep_for(b), {label});
    }
    ws.cnot(d1, d2);
    ws.error(gates.cnot, {d1, d2});
    for (int b = 0; b < 2; b++) {
        for (auto [c, t] : net.cnots) {
            ws.cnot(4 * b + (int)c, 4 * b + (int)t);
            ws.error(gates.cnot, {4 * b + (int)c, 4 * b + (int)t});
        }
    }
    ws.state.rebase(bell_generators(s));
    return std::move(ws.state);
}

enum class PurifyKind : uint8_t { Ztype, Xtype };

/// One bilateral purification step; the sacrifice is consumed.
template <typename T>
NoisyState<T> purify_once(const NoisyState<T> &kept, const NoisyState<T> &sacrifice, PurifyKind kind,
                          const GateErrorSet<T> &gates) {
    if (kept.num_qubits() != 8 || sacrifice.num_qubits() != 8) {
        throw std::invalid_argument("Purification needs two 8-qubit encoded Bell pairs.");
    }
    if (kept.gens.rows != sacrifice.gens.rows) {
        throw std::invalid_argument("Purification inputs use different spectators or frames.");
    }
    auto frame = kept.gens.rows;
    NoisyState<T> st = tensor_product(kept, sacrifice);
    auto meas = gates.meas_for(kind == PurifyKind::Ztype ? Basis::Z0 : Basis::Xplus);
    for (int i = 7; i >= 0; i--) {
        uint32_t k = (uint32_t)i;
        uint32_t s = 8 + (uint32_t)i;
        if (kind == PurifyKind::Ztype) {
            st.apply_gate(Gate::cnot(k, s));
            st.apply_error(gates.cnot, {k, s});
            st.apply_error(meas, {s});
            st.project(s, Basis::Z0);
        } else {
            st.apply_gate(Gate::cnot(s, k));
            st.apply_error(gates.cnot, {s, k});
            st.apply_error(meas, {s});
            st.project(s, Basis::Xplus);
        }
    }
    st.rebase(frame);
    return st;
}

template <typename T>
NoisyState<T> average_states(const NoisyState<T> &a, const NoisyState<T> &b) {
    if (a.gens.rows != b.gens.rows) {
        throw std::invalid_argument("Cannot average states in different frames.");
    }
    NoisyState<T> out = a;
    for (size_t s = 0; s < out.dist.size(); s++) {
        out.dist[s] = (a.dist[s] + b.dist[s]) * T(0.5);
    }
    return out;
}

/// Syndrome relabeling that exchanges the two blocks of the encoded Bell pair.
inline uint32_t swap_blocks_syndrome(uint32_t s) {
    return ((s & 0x7) << 3) | ((s >> 3) & 0x7) | (s & 0xC0);
}

struct OrderMasses {
    int cycle = 0;
    double z_then_x = 0;
    double x_then_z = 0;
};

template <typename T>
struct ComputedBellModel {
    Spectator spectator = Spectator::Zero;
    std::vector<T> dist;
    uint64_t network_fingerprint = 0;
    std::string network;
    int cycles = 0;
    std::vector<OrderMasses> order_masses;
    /// Exact-scalar total masses per cycle, for equality checks on exact backends.
    std::vector<std::pair<T, T>> order_masses_exact;
};

/// Where the sacrificial pairs of a purification cycle come from.
///   Raw: fresh unpurified pairs in every step.
///   CrossOrder: raw pairs in cycle 1; later, a step of type K consumes the previous
///     cycle's pair whose last step was not of type K.
///   Tree: both inputs of every step are identically prepared, so a cycle consumes
///     four pairs of the previous stage.
enum class SacrificePolicy : uint8_t { Raw, CrossOrder, Tree };

inline const char *sacrifice_policy_name(SacrificePolicy p) {
    switch (p) {
        case SacrificePolicy::Raw:
            return "raw";
        case SacrificePolicy::CrossOrder:
            return "cross-order";
        default:
            return "tree";
    }
}

struct BellSchedule {
    int cycles = 2;
    SacrificePolicy sacrifices = SacrificePolicy::Tree;
    bool symmetrize = true;
};

template <typename T>
ComputedBellModel<T> compute_bell_model(const GateErrorSet<T> &gates, Spectator s, BellSchedule sched = {}) {
    if (sched.cycles < 0) {
        throw std::invalid_argument("Negative purification cycle count.");
    }
    ComputedBellModel<T> out;
    out.spectator = s;
    out.cycles = sched.cycles;
    const auto &net = synthesize_encoding_network(s);
    out.network = net.describe();
    out.network_fingerprint = net.fingerprint();

    const auto Z = PurifyKind::Ztype;
    const auto X = PurifyKind::Xtype;
    NoisyState<T> raw = prepare_noisy_bell(gates, s);
    NoisyState<T> kept = raw;
    NoisyState<T> zx_prev = raw;
    NoisyState<T> xz_prev = raw;
    for (int c = 1; c <= sched.cycles; c++) {
        NoisyState<T> zx;
        NoisyState<T> xz;
        if (sched.sacrifices == SacrificePolicy::Tree) {
            auto a = purify_once(kept, kept, Z, gates);
            auto b = purify_once(kept, kept, X, gates);
            zx = purify_once(a, a, X, gates);
            xz = purify_once(b, b, Z, gates);
        } else {
            bool fresh = c == 1 || sched.sacrifices == SacrificePolicy::Raw;
            const NoisyState<T> &z_sac = fresh ? raw : zx_prev;
            const NoisyState<T> &x_sac = fresh ? raw : xz_prev;
            zx = purify_once(purify_once(kept, z_sac, Z, gates), x_sac, X, gates);
            xz = purify_once(purify_once(kept, x_sac, X, gates), z_sac, Z, gates);
        }
        T mzx = zx.total_mass();
        T mxz = xz.total_mass();
        out.order_masses.push_back({c, to_double(mzx), to_double(mxz)});
        out.order_masses_exact.emplace_back(mzx, mxz);
        kept = average_states(zx, xz);
        zx_prev = std::move(zx);
        xz_prev = std::move(xz);
    }
    if (sched.symmetrize) {
        NoisyState<T> swapped = kept;
        for (uint32_t syn = 0; syn < 256; syn++) {
            swapped.dist[swap_blocks_syndrome(syn)] = kept.dist[syn];
        }
        kept = average_states(kept, swapped);
    }
    kept.normalize();
    out.dist = std::move(kept.dist);
    return out;
}

template <typename T>
nlohmann::ordered_json bell_model_to_json(const ComputedBellModel<T> &m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (size_t syn = 0; syn < m.dist.size(); syn++) {
        std::string bits(8, '0');
        for (int i = 0; i < 8; i++) {
            bits[i] = (char)('0' + ((syn >> i) & 1));
        }
        rows.push_back({{"syndrome", bits}, {"likelihood", to_string(m.dist[syn])}});
    }
    std::vector<std::string> gens;
    for (const auto &g : bell_generators(m.spectator)) {
        gens.push_back(g.str());
    }
    return {{"spectator", spectator_name(m.spectator)},
            {"generators", gens},
            {"network", m.network},
            {"network_hash", m.network_fingerprint},
            {"cycles", m.cycles},
            {"syndromes", rows}};
}

}  // namespace postsel

#endif
