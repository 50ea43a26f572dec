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

#ifndef POSTSEL_SYMPLECTIC_HPP
#define POSTSEL_SYMPLECTIC_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace postsel {

constexpr uint32_t MAX_QUBITS = 64;

/// A phase-free Pauli product in X^x Z^z normal form. Bit q of `xs`/`zs` is qubit q.
struct PauliProduct {
    uint32_t n = 0;
    uint64_t xs = 0;
    uint64_t zs = 0;

    PauliProduct() = default;
    PauliProduct(uint32_t n, uint64_t xs, uint64_t zs) : n(n), xs(xs), zs(zs) {
        if (n > MAX_QUBITS) {
            throw std::invalid_argument("PauliProduct supports at most 64 qubits.");
        }
        uint64_t mask = n == 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
        if ((xs | zs) & ~mask) {
            throw std::invalid_argument("PauliProduct bits set beyond qubit count.");
        }
    }

    static PauliProduct identity(uint32_t n) {
        return PauliProduct(n, 0, 0);
    }
    static PauliProduct x(uint32_t n, uint32_t q) {
        return PauliProduct(n, uint64_t{1} << q, 0);
    }
    static PauliProduct z(uint32_t n, uint32_t q) {
        return PauliProduct(n, 0, uint64_t{1} << q);
    }
    static PauliProduct y(uint32_t n, uint32_t q) {
        return PauliProduct(n, uint64_t{1} << q, uint64_t{1} << q);
    }

    /// Parses strings like "XXIZ" (character k is qubit k).
    static PauliProduct from_str(std::string_view text) {
        if (text.size() > MAX_QUBITS) {
            throw std::invalid_argument("Pauli string too long.");
        }
        uint64_t x = 0;
        uint64_t z = 0;
        for (size_t k = 0; k < text.size(); k++) {
            char c = text[k];
            uint64_t b = uint64_t{1} << k;
            if (c == 'X' || c == 'x') {
                x |= b;
            } else if (c == 'Z' || c == 'z') {
                z |= b;
            } else if (c == 'Y' || c == 'y') {
                x |= b;
                z |= b;
            } else if (c != 'I' && c != '_' && c != 'i') {
                throw std::invalid_argument("Bad Pauli character in '" + std::string(text) + "'.");
            }
        }
        return PauliProduct((uint32_t)text.size(), x, z);
    }

    std::string str() const {
        std::string out(n, 'I');
        for (uint32_t q = 0; q < n; q++) {
            out[q] = "IXZY"[get(q)];
        }
        return out;
    }

    /// 0=I, 1=X, 2=Z, 3=Y.
    uint8_t get(uint32_t q) const {
        return (uint8_t)(((xs >> q) & 1) | (((zs >> q) & 1) << 1));
    }

    uint32_t weight() const {
        return (uint32_t)std::popcount(xs | zs);
    }

    bool is_identity() const {
        return (xs | zs) == 0;
    }

    bool operator==(const PauliProduct &other) const = default;

    /// Lexicographic on (x_bits, z_bits) as integers.
    bool operator<(const PauliProduct &other) const {
        if (n != other.n) {
            return n < other.n;
        }
        if (xs != other.xs) {
            return xs < other.xs;
        }
        return zs < other.zs;
    }
};

struct SignedPauli {
    PauliProduct pauli;
    bool sign = false;
};

enum class GateKind : uint8_t { CNOT, H, SWAP };

struct Gate {
    GateKind kind;
    uint32_t a;
    uint32_t b;

    static Gate cnot(uint32_t control, uint32_t target) {
        return {GateKind::CNOT, control, target};
    }
    static Gate hadamard(uint32_t q) {
        return {GateKind::H, q, q};
    }
    static Gate swap(uint32_t q1, uint32_t q2) {
        return {GateKind::SWAP, q1, q2};
    }
    bool operator==(const Gate &other) const = default;
};

inline void check_same_size(const PauliProduct &p, const PauliProduct &q) {
    if (p.n != q.n) {
        throw std::invalid_argument("Pauli products have different qubit counts.");
    }
}

inline bool commutes(const PauliProduct &p, const PauliProduct &q) {
    check_same_size(p, q);
    return ((std::popcount(p.xs & q.zs) + std::popcount(p.zs & q.xs)) & 1) == 0;
}

/// Product in X^x Z^z form. Sign bit is z_p . x_q mod 2.
inline SignedPauli multiply(const PauliProduct &p, const PauliProduct &q) {
    check_same_size(p, q);
    return {PauliProduct(p.n, p.xs ^ q.xs, p.zs ^ q.zs), (std::popcount(p.zs & q.xs) & 1) != 0};
}

inline SignedPauli conjugate_by_gate(const PauliProduct &p, const Gate &g) {
    if (g.a >= p.n || g.b >= p.n) {
        throw std::out_of_range("Gate qubit out of range.");
    }
    uint64_t x = p.xs;
    uint64_t z = p.zs;
    bool sign = false;
    switch (g.kind) {
        case GateKind::CNOT: {
            if (g.a == g.b) {
                throw std::invalid_argument("cnot control equals target.");
            }
            x ^= ((x >> g.a) & 1) << g.b;
            z ^= ((z >> g.b) & 1) << g.a;
            break;
        }
        case GateKind::H: {
            uint64_t bx = (x >> g.a) & 1;
            uint64_t bz = (z >> g.a) & 1;
            sign = (bx & bz) != 0;
            x = (x & ~(uint64_t{1} << g.a)) | (bz << g.a);
            z = (z & ~(uint64_t{1} << g.a)) | (bx << g.a);
            break;
        }
        case GateKind::SWAP: {
            auto swap_bits = [&](uint64_t v) {
                uint64_t d = ((v >> g.a) ^ (v >> g.b)) & 1;
                return v ^ (d << g.a) ^ (d << g.b);
            };
            x = swap_bits(x);
            z = swap_bits(z);
            break;
        }
    }
    return {PauliProduct(p.n, x, z), sign};
}

// Hermitian form: a row (x, z) stands for i^{x.z} X^x Z^z, the Hermitian
// operator with the same bits. The helpers below give signs in that form.

/// Sign s with herm(p) herm(q) = (-1)^s herm(p*q). Requires commuting inputs.
inline SignedPauli hermitian_multiply(const PauliProduct &p, const PauliProduct &q) {
    check_same_size(p, q);
    if (!commutes(p, q)) {
        throw std::invalid_argument("hermitian_multiply needs commuting operands.");
    }
    uint64_t x = p.xs ^ q.xs;
    uint64_t z = p.zs ^ q.zs;
    int phase = std::popcount(p.xs & p.zs) + std::popcount(q.xs & q.zs) - std::popcount(x & z) +
                2 * std::popcount(p.zs & q.xs);
    phase = ((phase % 4) + 4) % 4;
    return {PauliProduct(p.n, x, z), phase == 2};
}

/// Sign s with U herm(p) U^dag = (-1)^s herm(p').
inline SignedPauli hermitian_conjugate(const PauliProduct &p, const Gate &g) {
    SignedPauli r = conjugate_by_gate(p, g);
    int phase = std::popcount(p.xs & p.zs) + 2 * (int)r.sign - std::popcount(r.pauli.xs & r.pauli.zs);
    phase = ((phase % 4) + 4) % 4;
    r.sign = phase == 2;
    return r;
}

/// An ordered list of commuting, independent stabilizer generators.
struct GeneratorMatrix {
    uint32_t n = 0;
    std::vector<PauliProduct> rows;

    GeneratorMatrix() = default;
    GeneratorMatrix(uint32_t n, std::vector<PauliProduct> rows) : n(n), rows(std::move(rows)) {
    }

    static GeneratorMatrix from_strs(const std::vector<std::string> &texts) {
        GeneratorMatrix m;
        for (const auto &t : texts) {
            m.rows.push_back(PauliProduct::from_str(t));
        }
        m.n = m.rows.empty() ? 0 : m.rows[0].n;
        for (const auto &r : m.rows) {
            if (r.n != m.n) {
                throw std::invalid_argument("Generator rows have different lengths.");
            }
        }
        return m;
    }

    size_t num_rows() const {
        return rows.size();
    }

    std::vector<std::string> strs() const {
        std::vector<std::string> out;
        for (const auto &r : rows) {
            out.push_back(r.str());
        }
        return out;
    }

    /// Throws unless rows commute pairwise and are GF(2)-independent.
    void validate() const;
};

/// Bit i set iff p anticommutes with row i.
inline uint64_t flip_pattern(const GeneratorMatrix &m, const PauliProduct &p) {
    if (p.n != m.n) {
        throw std::invalid_argument("flip_pattern qubit count mismatch.");
    }
    uint64_t out = 0;
    for (size_t i = 0; i < m.rows.size(); i++) {
        const auto &r = m.rows[i];
        out |= (uint64_t)((std::popcount(p.xs & r.zs) + std::popcount(p.zs & r.xs)) & 1) << i;
    }
    return out;
}

/// Incremental GF(2) span over Pauli bit vectors that remembers which inputs
/// were combined. Inputs are indexed by insertion order (at most 64).
class Gf2Span {
   public:
    /// Returns false (and stores nothing) if v is already in the span.
    bool insert(const PauliProduct &v) {
        auto [rx, rz, combo] = reduce(v);
        uint64_t own = uint64_t{1} << count_;
        count_++;
        if ((rx | rz) == 0) {
            return false;
        }
        Entry fresh{rx, rz, combo ^ own};
        int l = lead(rx, rz);
        for (auto &e : basis_) {
            bool hit = l >= 64 ? ((e.x >> (l - 64)) & 1) : ((e.z >> l) & 1);
            if (hit) {
                e.x ^= fresh.x;
                e.z ^= fresh.z;
                e.combo ^= fresh.combo;
            }
        }
        basis_.push_back(fresh);
        return true;
    }

    /// Sets *mask to the inserted vectors summing to v. False if v is outside the span.
    bool express(const PauliProduct &v, uint64_t *mask) const {
        auto [rx, rz, combo] = reduce(v);
        *mask = combo;
        return (rx | rz) == 0;
    }

    size_t rank() const {
        return basis_.size();
    }

   private:
    struct Entry {
        uint64_t x;
        uint64_t z;
        uint64_t combo;
    };
    struct Reduced {
        uint64_t x;
        uint64_t z;
        uint64_t combo;
    };
    static int lead(uint64_t x, uint64_t z) {
        if (x) {
            return 64 + std::countr_zero(x);
        }
        if (z) {
            return std::countr_zero(z);
        }
        return -1;
    }
    Reduced reduce(const PauliProduct &v) const {
        uint64_t x = v.xs;
        uint64_t z = v.zs;
        uint64_t combo = 0;
        for (const auto &e : basis_) {
            int l = lead(e.x, e.z);
            bool hit = l >= 64 ? ((x >> (l - 64)) & 1) : ((z >> l) & 1);
            if (hit) {
                x ^= e.x;
                z ^= e.z;
                combo ^= e.combo;
            }
        }
        return {x, z, combo};
    }

    std::vector<Entry> basis_;
    uint32_t count_ = 0;
};

inline void GeneratorMatrix::validate() const {
    Gf2Span span;
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].n != n) {
            throw std::invalid_argument("Generator row has wrong qubit count.");
        }
        for (size_t j = 0; j < i; j++) {
            if (!commutes(rows[i], rows[j])) {
                throw std::invalid_argument(
                    "Generators " + rows[j].str() + " and " + rows[i].str() + " anticommute.");
            }
        }
        if (!span.insert(rows[i])) {
            throw std::invalid_argument("Generator " + rows[i].str() + " is dependent.");
        }
    }
}

/// Embeds a k-qubit Pauli into n qubits; factor k goes to qubit targets[k].
inline PauliProduct embed(const PauliProduct &p, uint32_t n, const uint32_t *targets) {
    uint64_t x = 0;
    uint64_t z = 0;
    for (uint32_t k = 0; k < p.n; k++) {
        uint32_t t = targets[k];
        if (t >= n) {
            throw std::out_of_range("embed target out of range.");
        }
        x |= ((p.xs >> k) & 1) << t;
        z |= ((p.zs >> k) & 1) << t;
    }
    return PauliProduct(n, x, z);
}

/// Tensor product p (low qubits) with q (high qubits).
inline PauliProduct tensor(const PauliProduct &p, const PauliProduct &q) {
    return PauliProduct(p.n + q.n, p.xs | (q.xs << p.n), p.zs | (q.zs << p.n));
}

}  // namespace postsel

#endif
