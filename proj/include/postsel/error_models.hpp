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

#ifndef POSTSEL_ERROR_MODELS_HPP
#define POSTSEL_ERROR_MODELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "postsel/scalar.hpp"
#include "postsel/symplectic.hpp"

namespace postsel {

enum class Basis : uint8_t { Z0, Xplus };

inline const char *basis_name(Basis b) {
    return b == Basis::Z0 ? "Z0" : "Xplus";
}

/// Which fixed state the second encoded qubit of a block is in.
enum class Spectator : uint8_t { Zero, Plus };

inline const char *spectator_name(Spectator s) {
    return s == Spectator::Zero ? "zero" : "plus";
}

inline char spectator_char(Spectator s) {
    return s == Spectator::Zero ? '0' : '+';
}

/// Independent error after (or before) one network element. Identity has likelihood 1.
template <typename T>
struct LocationErrorModel {
    uint32_t arity = 1;
    std::vector<std::pair<PauliProduct, T>> entries;

    LocationErrorModel() = default;
    explicit LocationErrorModel(uint32_t arity) : arity(arity) {
    }

    void set(const PauliProduct &p, T v) {
        if (p.n != arity) {
            throw std::invalid_argument("Error entry arity mismatch.");
        }
        if (p.is_identity()) {
            throw std::invalid_argument("Identity has implicit likelihood 1.");
        }
        for (auto &e : entries) {
            if (e.first == p) {
                e.second = v;
                return;
            }
        }
        entries.emplace_back(p, v);
        std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    }

    void set(const std::string &p, T v) {
        set(PauliProduct::from_str(p), v);
    }

    T get(const PauliProduct &p) const {
        for (const auto &e : entries) {
            if (e.first == p) {
                return e.second;
            }
        }
        return T(0);
    }

    T get(const std::string &p) const {
        return get(PauliProduct::from_str(p));
    }

    T total() const {
        T acc(0);
        for (const auto &e : entries) {
            acc += e.second;
        }
        return acc;
    }

    /// Keeps only the entry for p (used to pick the relevant flip of a prep/meas model).
    LocationErrorModel only(const std::string &p) const {
        LocationErrorModel out(arity);
        auto pp = PauliProduct::from_str(p);
        out.set(pp, get(pp));
        return out;
    }
};

struct PhysicalErrorParams {
    double p_prep = 0;
    double p_meas = 0;
    double p_cnot = 0;
    double p_hadamard = 0;
    double p_special = 0;

    /// Defaults tie measurement and special preparation to p_prep and the
    /// Hadamard to 1.5 p_prep in likelihood-consistent form.
    static PhysicalErrorParams from_prep_cnot(double p_prep, double p_cnot) {
        PhysicalErrorParams out;
        out.p_prep = p_prep;
        out.p_meas = p_prep;
        out.p_special = p_prep;
        out.p_cnot = p_cnot;
        out.p_hadamard = 1.5 * p_prep;
        return out;
    }

    void validate() const {
        for (double p : {p_prep, p_meas, p_cnot, p_hadamard, p_special}) {
            if (!(p >= 0) || !(p < 1)) {
                throw std::invalid_argument("Physical error probabilities must lie in [0, 1).");
            }
        }
    }
};

template <typename T>
T likelihood_from_probability(const T &p) {
    return p / (T(1) - p);
}

template <typename T>
T probability_from_likelihood(const T &e) {
    return e / (T(1) + e);
}

/// Error models of every gate type at one concatenation level.
///
/// prep holds {X: flip after |0> prep, Z: flip after |+> prep}; meas holds
/// {X: flip before Z measurement, Z: flip before X measurement}.
template <typename T>
struct GateErrorSet {
    int level = 0;
    LocationErrorModel<T> prep{1};
    LocationErrorModel<T> meas{1};
    LocationErrorModel<T> cnot{2};
    LocationErrorModel<T> hadamard{1};
    LocationErrorModel<T> special{1};

    LocationErrorModel<T> prep_for(Basis b) const {
        return prep.only(b == Basis::Z0 ? "X" : "Z");
    }
    LocationErrorModel<T> meas_for(Basis b) const {
        return meas.only(b == Basis::Z0 ? "X" : "Z");
    }
};

/// All 15 non-identity two-qubit Paulis in canonical order.
inline std::vector<PauliProduct> two_qubit_paulis() {
    std::vector<PauliProduct> out;
    for (uint64_t x = 0; x < 4; x++) {
        for (uint64_t z = 0; z < 4; z++) {
            if (x | z) {
                out.emplace_back(2, x, z);
            }
        }
    }
    return out;
}

template <typename T>
GateErrorSet<T> uniform_physical_set(const PhysicalErrorParams &params) {
    params.validate();
    GateErrorSet<T> out;
    out.level = 0;
    T ep = likelihood_from_probability(from_decimal<T>(params.p_prep));
    T em = likelihood_from_probability(from_decimal<T>(params.p_meas));
    T ec = likelihood_from_probability(from_decimal<T>(params.p_cnot));
    T eh = likelihood_from_probability(from_decimal<T>(params.p_hadamard));
    T es = likelihood_from_probability(from_decimal<T>(params.p_special));
    out.prep.set("X", ep);
    out.prep.set("Z", ep);
    out.meas.set("X", em);
    out.meas.set("Z", em);
    for (const auto &p : two_qubit_paulis()) {
        out.cnot.set(p, ec / T(15));
    }
    for (const char *p : {"X", "Z", "Y"}) {
        out.hadamard.set(p, eh / T(3));
    }
    out.special.set("X", es);
    return out;
}

/// Likelihoods (or probabilities) for X, Z and Y on one qubit.
template <typename T>
struct PauliTriple {
    T x = T(0);
    T z = T(0);
    T y = T(0);
};

/// Per-Pauli single-slot marginals of a two-qubit model, maximized over the two slots.
template <typename T>
PauliTriple<T> cnot_marginals(const LocationErrorModel<T> &cnot) {
    if (cnot.arity != 2) {
        throw std::invalid_argument("cnot_marginals needs an arity-2 model.");
    }
    std::array<std::array<T, 4>, 2> m{};
    for (auto &slot : m) {
        slot.fill(T(0));
    }
    for (const auto &[p, e] : cnot.entries) {
        for (uint32_t s = 0; s < 2; s++) {
            m[s][p.get(s)] += e;
        }
    }
    auto mx = [](const T &a, const T &b) { return a < b ? b : a; };
    return {mx(m[0][1], m[1][1]), mx(m[0][2], m[1][2]), mx(m[0][3], m[1][3])};
}

struct PauliWeights {
    double wx = 1;
    double wz = 1;
    double wy = 1;

    double of(uint8_t pauli_code) const {
        switch (pauli_code) {
            case 1:
                return wx;
            case 2:
                return wz;
            case 3:
                return wy;
            default:
                return 0;
        }
    }

    double weight(const PauliProduct &p) const {
        double acc = 0;
        for (uint32_t q = 0; q < p.n; q++) {
            acc += of(p.get(q));
        }
        return acc;
    }

    static PauliWeights unit() {
        return {1, 1, 1};
    }
};

/// Natural-log weights; a zero marginal gives an infinite weight.
template <typename T>
PauliWeights weights_from_marginals(const PauliTriple<T> &m) {
    auto w = [](double v) {
        if (v < 0) {
            throw std::invalid_argument("Negative marginal likelihood.");
        }
        return v == 0 ? std::numeric_limits<double>::infinity() : -std::log(v);
    };
    return {w(to_double(m.x)), w(to_double(m.z)), w(to_double(m.y))};
}

/// Four-qubit Paulis are coded as x | z << 4.
inline PauliProduct block_pauli(uint8_t code) {
    return PauliProduct(4, code & 0xF, code >> 4);
}
inline uint8_t block_code(const PauliProduct &p) {
    return (uint8_t)(p.xs | (p.zs << 4));
}

inline std::array<PauliProduct, 3> block_stabilizer(Spectator s) {
    return {PauliProduct::from_str("XXXX"), PauliProduct::from_str("ZZZZ"),
            PauliProduct::from_str(s == Spectator::Zero ? "IIZZ" : "IXIX")};
}

inline PauliProduct logical_x() {
    return PauliProduct::from_str("XXII");
}
inline PauliProduct logical_z() {
    return PauliProduct::from_str("ZIZI");
}

/// The 32 cosets of a block stabilizer in canonical order, with membership.
struct CosetTable {
    Spectator spectator = Spectator::Zero;
    std::array<std::array<uint8_t, 8>, 32> members{};
    std::array<uint8_t, 256> coset_of{};

    static const CosetTable &get(Spectator s) {
        static const CosetTable zero = build(Spectator::Zero);
        static const CosetTable plus = build(Spectator::Plus);
        return s == Spectator::Zero ? zero : plus;
    }

    /// Minimum-weight member per coset; ties go to the canonically least member.
    std::array<PauliProduct, 32> min_weight_reps(const PauliWeights &w) const {
        std::array<PauliProduct, 32> out;
        for (size_t c = 0; c < 32; c++) {
            double best = std::numeric_limits<double>::infinity();
            PauliProduct pick = block_pauli(members[c][0]);
            bool found = false;
            for (uint8_t code : members[c]) {
                auto p = block_pauli(code);
                double v = w.weight(p);
                if (!found || v < best) {
                    best = v;
                    pick = p;
                    found = true;
                }
            }
            out[c] = pick;
        }
        return out;
    }

   private:
    static uint16_t order_key(uint8_t code) {
        return (uint16_t)(((code & 0xF) << 4) | (code >> 4));
    }

    static CosetTable build(Spectator s) {
        CosetTable t;
        t.spectator = s;
        auto gens = block_stabilizer(s);
        std::array<uint8_t, 8> group{};
        for (int m = 0; m < 8; m++) {
            PauliProduct acc = PauliProduct::identity(4);
            for (int g = 0; g < 3; g++) {
                if ((m >> g) & 1) {
                    acc = multiply(acc, gens[g]).pauli;
                }
            }
            group[m] = block_code(acc);
        }
        std::array<bool, 256> seen{};
        std::vector<std::array<uint8_t, 8>> cosets;
        for (int code = 0; code < 256; code++) {
            if (seen[code]) {
                continue;
            }
            std::array<uint8_t, 8> mem{};
            for (int m = 0; m < 8; m++) {
                mem[m] = (uint8_t)(code ^ group[m]);
                seen[mem[m]] = true;
            }
            std::sort(mem.begin(), mem.end(), [](uint8_t a, uint8_t b) { return order_key(a) < order_key(b); });
            cosets.push_back(mem);
        }
        std::sort(cosets.begin(), cosets.end(),
                  [](const auto &a, const auto &b) { return order_key(a[0]) < order_key(b[0]); });
        if (cosets.size() != 32) {
            throw std::logic_error("Coset enumeration did not produce 32 cosets.");
        }
        for (size_t c = 0; c < 32; c++) {
            t.members[c] = cosets[c];
            for (uint8_t code : cosets[c]) {
                t.coset_of[code] = (uint8_t)c;
            }
        }
        return t;
    }
};

/// Independent error model of one four-qubit block, one likelihood per coset.
template <typename T>
struct CosetErrorModel {
    Spectator spectator = Spectator::Zero;
    std::array<T, 32> likelihoods{};
    std::array<PauliProduct, 32> reps{};

    CosetErrorModel() = default;
    CosetErrorModel(Spectator s, const PauliWeights &w) : spectator(s) {
        likelihoods.fill(T(0));
        likelihoods[0] = T(1);
        reps = CosetTable::get(s).min_weight_reps(w);
    }

    /// As one error location on the block's four qubits.
    LocationErrorModel<T> location() const {
        const auto &table = CosetTable::get(spectator);
        LocationErrorModel<T> out(4);
        for (size_t c = 1; c < 32; c++) {
            if (table.coset_of[block_code(reps[c])] != c) {
                throw std::logic_error("Coset representative outside its coset.");
            }
            if (!is_zero(likelihoods[c])) {
                out.entries.emplace_back(reps[c], likelihoods[c]);
            }
        }
        std::sort(out.entries.begin(), out.entries.end(),
                  [](const auto &a, const auto &b) { return a.first < b.first; });
        return out;
    }

    T total() const {
        T acc(0);
        for (size_t c = 1; c < 32; c++) {
            acc += likelihoods[c];
        }
        return acc;
    }
};

template <typename T>
nlohmann::ordered_json location_to_json(const LocationErrorModel<T> &m) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto &[p, e] : m.entries) {
        out[p.str()] = to_string(e);
    }
    return out;
}

template <typename T>
nlohmann::ordered_json gate_set_to_json(const GateErrorSet<T> &g) {
    nlohmann::ordered_json out;
    out["level"] = g.level;
    out["prep"] = location_to_json(g.prep);
    out["meas"] = location_to_json(g.meas);
    out["cnot"] = location_to_json(g.cnot);
    out["hadamard"] = location_to_json(g.hadamard);
    out["special"] = location_to_json(g.special);
    return out;
}

template <typename T>
nlohmann::ordered_json coset_model_to_json(const CosetErrorModel<T> &m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (size_t c = 0; c < 32; c++) {
        rows.push_back({{"coset", c}, {"rep", m.reps[c].str()}, {"likelihood", to_string(m.likelihoods[c])}});
    }
    return {{"spectator", spectator_name(m.spectator)}, {"cosets", rows}};
}

}  // namespace postsel

#endif
