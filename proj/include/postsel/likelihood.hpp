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

#ifndef POSTSEL_LIKELIHOOD_HPP
#define POSTSEL_LIKELIHOOD_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "postsel/error_models.hpp"
#include "postsel/scalar.hpp"
#include "postsel/symplectic.hpp"

namespace postsel {

/// Raised when postselection leaves no mass at all.
struct ZeroAcceptanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a requested projection or rebase is inconsistent with the stabilizer.
struct StructuralError : std::logic_error {
    using std::logic_error::logic_error;
};

constexpr uint32_t MAX_ROWS = 26;

/// A stabilizer state together with a likelihood for every syndrome value.
///
/// Row i of the generator matrix is read in Hermitian form; syndrome bit i set
/// means the state sits in the -1 eigenspace of that row. dist[s] is the
/// (unnormalized) likelihood of syndrome s, row 0 being the least significant bit.
template <typename T>
class NoisyState {
   public:
    GeneratorMatrix gens;
    std::vector<T> dist;

    NoisyState() : dist{T(1)} {
    }

    NoisyState(GeneratorMatrix g, std::vector<T> d) : gens(std::move(g)), dist(std::move(d)) {
        if (dist.size() != (size_t{1} << gens.rows.size())) {
            throw std::invalid_argument("Distribution length must be 2^rows.");
        }
    }

    uint32_t num_qubits() const {
        return gens.n;
    }
    uint32_t num_rows() const {
        return (uint32_t)gens.rows.size();
    }

    /// Appends a qubit in |0> (row Z) or |+> (row X) and returns its index.
    uint32_t add_qubit(Basis b) {
        if (num_rows() >= MAX_ROWS || gens.n >= MAX_QUBITS) {
            throw std::length_error("Too many qubits for a dense likelihood array.");
        }
        uint32_t q = gens.n;
        gens.n++;
        for (auto &r : gens.rows) {
            r.n = gens.n;
        }
        gens.rows.push_back(b == Basis::Z0 ? PauliProduct::z(gens.n, q) : PauliProduct::x(gens.n, q));
        dist.resize(dist.size() * 2, T(0));
        return q;
    }

    void apply_gate(const Gate &g) {
        uint64_t flips = 0;
        for (size_t i = 0; i < gens.rows.size(); i++) {
            auto r = hermitian_conjugate(gens.rows[i], g);
            gens.rows[i] = r.pauli;
            flips |= (uint64_t)r.sign << i;
        }
        if (flips) {
            xor_indices(flips);
        }
    }

    void apply_error(const LocationErrorModel<T> &model, const std::vector<uint32_t> &qubits) {
        if (qubits.size() != model.arity) {
            throw std::invalid_argument("Error location arity does not match qubit count.");
        }
        for (size_t a = 0; a < qubits.size(); a++) {
            if (qubits[a] >= gens.n) {
                throw std::out_of_range("Error location qubit out of range.");
            }
            for (size_t b = 0; b < a; b++) {
                if (qubits[a] == qubits[b]) {
                    throw std::invalid_argument("Error location repeats a qubit.");
                }
            }
        }
        // Group entries by flip pattern; entries that flip nothing join the identity.
        T keep(1);
        std::vector<std::pair<uint64_t, T>> groups;
        for (const auto &[p, e] : model.entries) {
            if (is_zero(e)) {
                continue;
            }
            uint64_t f = flip_pattern(gens, embed(p, gens.n, qubits.data()));
            if (f == 0) {
                keep += e;
                continue;
            }
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto &g) { return g.first == f; });
            if (it == groups.end()) {
                groups.emplace_back(f, e);
            } else {
                it->second += e;
            }
        }
        if (groups.empty()) {
            if (!(keep == T(1))) {
                for (auto &v : dist) {
                    v *= keep;
                }
            }
            return;
        }
        std::sort(groups.begin(), groups.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
        std::vector<T> out(dist.size());
        for (size_t s = 0; s < dist.size(); s++) {
            out[s] = dist[s] * keep;
        }
        for (const auto &[f, e] : groups) {
            for (size_t s = 0; s < dist.size(); s++) {
                if (!is_zero(dist[s ^ f])) {
                    out[s] += e * dist[s ^ f];
                }
            }
        }
        dist = std::move(out);
    }

    /// Row i becomes row i times row j.
    void add_row(uint32_t i, uint32_t j) {
        check_row(i);
        check_row(j);
        if (i == j) {
            throw std::invalid_argument("add_row needs distinct rows.");
        }
        auto prod = hermitian_multiply(gens.rows[i], gens.rows[j]);
        gens.rows[i] = prod.pauli;
        std::vector<T> out(dist.size());
        uint64_t sign = (uint64_t)prod.sign << i;
        for (size_t s = 0; s < dist.size(); s++) {
            uint64_t t = s ^ (((s >> j) & 1) << i) ^ sign;
            out[t] = std::move(dist[s]);
        }
        dist = std::move(out);
    }

    void swap_rows(uint32_t i, uint32_t j) {
        check_row(i);
        check_row(j);
        if (i == j) {
            return;
        }
        std::swap(gens.rows[i], gens.rows[j]);
        for (size_t s = 0; s < dist.size(); s++) {
            if (((s >> i) & 1) == 1 && ((s >> j) & 1) == 0) {
                std::swap(dist[s], dist[s ^ (uint64_t{1} << i) ^ (uint64_t{1} << j)]);
            }
        }
    }

    /// Measures qubit q in the given basis and keeps the +1 outcome.
    void project(uint32_t q, Basis b) {
        if (q >= gens.n) {
            throw std::out_of_range("Projected qubit out of range.");
        }
        const PauliProduct m = b == Basis::Z0 ? PauliProduct::z(gens.n, q) : PauliProduct::x(gens.n, q);
        uint32_t r = num_rows();
        std::vector<uint32_t> anti;
        for (uint32_t i = 0; i < r; i++) {
            if (!commutes(gens.rows[i], m)) {
                anti.push_back(i);
            }
        }
        if (!anti.empty()) {
            uint32_t pivot = anti.back();
            for (uint32_t i : anti) {
                if (i != pivot) {
                    add_row(i, pivot);
                }
            }
            swap_rows(pivot, r - 1);
            size_t half = dist.size() / 2;
            for (size_t s = 0; s < half; s++) {
                dist[s] += dist[s + half];
            }
            dist.resize(half);
        } else {
            Gf2Span span;
            for (const auto &row : gens.rows) {
                span.insert(row);
            }
            uint64_t combo = 0;
            if (!span.express(m, &combo) || combo == 0) {
                throw StructuralError("Measured operator is not determined by the stabilizer.");
            }
            uint32_t pivot = 63 - std::countl_zero(combo);
            for (uint32_t i = 0; i < r; i++) {
                if (i != pivot && ((combo >> i) & 1)) {
                    add_row(pivot, i);
                }
            }
            if (!(gens.rows[pivot] == m)) {
                throw std::logic_error("Row reduction did not produce the measured operator.");
            }
            swap_rows(pivot, r - 1);
            dist.resize(dist.size() / 2);
            bool any = false;
            for (const auto &v : dist) {
                if (!is_zero(v)) {
                    any = true;
                    break;
                }
            }
            if (!any) {
                throw ZeroAcceptanceError("Postselection removed all likelihood mass.");
            }
        }
        gens.rows.pop_back();
        // Clear remaining components on q with the +1 eigen-operator, then drop the column.
        uint64_t flips = 0;
        for (uint32_t i = 0; i + 1 < r; i++) {
            auto &row = gens.rows[i];
            if (((row.xs | row.zs) >> q) & 1) {
                auto prod = hermitian_multiply(row, m);
                row = prod.pauli;
                flips |= (uint64_t)prod.sign << i;
            }
        }
        if (flips) {
            xor_indices(flips);
        }
        auto drop = [q](uint64_t v) {
            uint64_t low = v & ((uint64_t{1} << q) - 1);
            uint64_t high = (v >> (q + 1)) << q;
            return low | high;
        };
        gens.n--;
        for (auto &row : gens.rows) {
            if (((row.xs | row.zs) >> q) & 1) {
                throw std::logic_error("Row still acts on a projected qubit.");
            }
            row = PauliProduct(gens.n, drop(row.xs), drop(row.zs));
        }
    }

    /// Re-expresses the distribution in terms of different generators of the same group.
    void rebase(const std::vector<PauliProduct> &target) {
        uint32_t r = num_rows();
        if (target.size() != r) {
            throw StructuralError("Rebase target has the wrong number of generators.");
        }
        Gf2Span span;
        for (const auto &row : gens.rows) {
            span.insert(row);
        }
        std::vector<uint64_t> combos(r);
        std::vector<uint8_t> signs(r);
        Gf2Span check;
        for (uint32_t k = 0; k < r; k++) {
            if (target[k].n != gens.n) {
                throw StructuralError("Rebase target has the wrong qubit count.");
            }
            if (!span.express(target[k], &combos[k])) {
                throw StructuralError("Rebase target " + target[k].str() + " is not in the stabilizer group.");
            }
            if (!check.insert(target[k])) {
                throw StructuralError("Rebase targets are dependent.");
            }
            PauliProduct acc = PauliProduct::identity(gens.n);
            bool sign = false;
            for (uint32_t i = 0; i < r; i++) {
                if ((combos[k] >> i) & 1) {
                    auto prod = hermitian_multiply(acc, gens.rows[i]);
                    acc = prod.pauli;
                    sign ^= prod.sign;
                }
            }
            signs[k] = sign;
        }
        std::vector<T> out(dist.size(), T(0));
        for (size_t s = 0; s < dist.size(); s++) {
            uint64_t t = 0;
            for (uint32_t k = 0; k < r; k++) {
                t |= (uint64_t)((std::popcount(s & combos[k]) + signs[k]) & 1) << k;
            }
            out[t] = std::move(dist[s]);
        }
        gens.rows = target;
        dist = std::move(out);
    }

    T total_mass() const {
        T acc(0);
        for (const auto &v : dist) {
            acc += v;
        }
        return acc;
    }

    void normalize() {
        if (is_zero(dist[0])) {
            throw ZeroAcceptanceError("Cannot normalize: zero likelihood at the zero syndrome.");
        }
        T base = dist[0];
        for (auto &v : dist) {
            v = v / base;
        }
    }

    std::string dump() const {
        std::ostringstream out;
        out << "generators:";
        for (const auto &row : gens.rows) {
            out << ' ' << row.str();
        }
        out << '\n';
        uint32_t r = num_rows();
        for (size_t s = 0; s < dist.size(); s++) {
            if (is_zero(dist[s])) {
                continue;
            }
            std::string bits(r, '0');
            for (uint32_t i = 0; i < r; i++) {
                bits[i] = (char)('0' + ((s >> i) & 1));
            }
            out << bits << ' ' << to_string(dist[s]) << '\n';
        }
        return out.str();
    }

   private:
    void check_row(uint32_t i) const {
        if (i >= num_rows()) {
            throw std::out_of_range("Row index out of range.");
        }
    }

    void xor_indices(uint64_t mask) {
        for (size_t s = 0; s < dist.size(); s++) {
            size_t t = s ^ mask;
            if (s < t) {
                std::swap(dist[s], dist[t]);
            }
        }
    }
};

/// Joint state of a (low qubits, low syndrome bits) and b.
template <typename T>
NoisyState<T> tensor_product(const NoisyState<T> &a, const NoisyState<T> &b) {
    GeneratorMatrix g;
    g.n = a.gens.n + b.gens.n;
    for (const auto &r : a.gens.rows) {
        g.rows.push_back(tensor(r, PauliProduct::identity(b.gens.n)));
    }
    for (const auto &r : b.gens.rows) {
        g.rows.push_back(tensor(PauliProduct::identity(a.gens.n), r));
    }
    if (g.rows.size() > MAX_ROWS) {
        throw std::length_error("Too many qubits for a dense likelihood array.");
    }
    std::vector<T> d(a.dist.size() * b.dist.size(), T(0));
    for (size_t j = 0; j < b.dist.size(); j++) {
        if (is_zero(b.dist[j])) {
            continue;
        }
        for (size_t i = 0; i < a.dist.size(); i++) {
            d[i + j * a.dist.size()] = a.dist[i] * b.dist[j];
        }
    }
    return NoisyState<T>(std::move(g), std::move(d));
}

/// A NoisyState whose qubits are addressed by stable integer labels.
/// Projecting a qubit removes its label; the remaining labels keep their meaning.
template <typename T>
class LabeledState {
   public:
    NoisyState<T> state;
    std::vector<int> labels;
    size_t peak_qubits = 0;

    uint32_t index(int label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) {
            throw std::out_of_range("Unknown qubit label " + std::to_string(label) + ".");
        }
        return (uint32_t)(it - labels.begin());
    }

    void add(int label, Basis b) {
        if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
            throw std::invalid_argument("Duplicate qubit label " + std::to_string(label) + ".");
        }
        state.add_qubit(b);
        labels.push_back(label);
        peak_qubits = std::max(peak_qubits, labels.size());
    }

    void cnot(int control, int target) {
        state.apply_gate(Gate::cnot(index(control), index(target)));
    }

    void hadamard(int q) {
        state.apply_gate(Gate::hadamard(index(q)));
    }

    void error(const LocationErrorModel<T> &model, const std::vector<int> &qs) {
        std::vector<uint32_t> idx;
        for (int q : qs) {
            idx.push_back(index(q));
        }
        state.apply_error(model, idx);
    }

    void project(int label, Basis b) {
        uint32_t q = index(label);
        state.project(q, b);
        labels.erase(labels.begin() + q);
    }

    /// Builds a Pauli on the live qubits from (label, 'X'|'Y'|'Z') factors.
    PauliProduct pauli(const std::vector<std::pair<int, char>> &factors) const {
        uint64_t x = 0;
        uint64_t z = 0;
        for (auto [label, c] : factors) {
            uint64_t bit = uint64_t{1} << index(label);
            if (c == 'X' || c == 'Y') {
                x ^= bit;
            }
            if (c == 'Z' || c == 'Y') {
                z ^= bit;
            }
        }
        return PauliProduct(state.num_qubits(), x, z);
    }
};

}  // namespace postsel

#endif
