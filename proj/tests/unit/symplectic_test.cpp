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

#include "postsel/symplectic.hpp"

#include <array>
#include <complex>

#include "gtest/gtest.h"

using namespace postsel;

namespace {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;

Mat kron(const Mat &a, const Mat &b) {
    size_t n = a.size();
    size_t m = b.size();
    Mat out(n * m, std::vector<cd>(n * m));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            for (size_t k = 0; k < m; k++) {
                for (size_t l = 0; l < m; l++) {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    return out;
}

Mat mul(const Mat &a, const Mat &b) {
    size_t n = a.size();
    Mat out(n, std::vector<cd>(n));
    for (size_t i = 0; i < n; i++) {
        for (size_t k = 0; k < n; k++) {
            for (size_t j = 0; j < n; j++) {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

Mat dagger(const Mat &a) {
    size_t n = a.size();
    Mat out(n, std::vector<cd>(n));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            out[i][j] = std::conj(a[j][i]);
        }
    }
    return out;
}

bool close(const Mat &a, const Mat &b) {
    for (size_t i = 0; i < a.size(); i++) {
        for (size_t j = 0; j < a.size(); j++) {
            if (std::abs(a[i][j] - b[i][j]) > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

Mat scale(const Mat &a, cd s) {
    Mat out = a;
    for (auto &row : out) {
        for (auto &v : row) {
            v *= s;
        }
    }
    return out;
}

const Mat I2 = {{1, 0}, {0, 1}};
const Mat X2 = {{0, 1}, {1, 0}};
const Mat Z2 = {{1, 0}, {0, -1}};

// Qubit 0 is the least significant tensor factor (rightmost in kron order).
Mat single_on(const Mat &m, uint32_t q, uint32_t n) {
    Mat out = {{1}};
    for (int k = (int)n - 1; k >= 0; k--) {
        out = kron(out, (uint32_t)k == q ? m : I2);
    }
    return out;
}

Mat xz_form(const PauliProduct &p) {
    Mat xs = single_on(I2, 0, p.n);
    Mat zs = xs;
    for (uint32_t q = 0; q < p.n; q++) {
        if ((p.xs >> q) & 1) {
            xs = mul(xs, single_on(X2, q, p.n));
        }
        if ((p.zs >> q) & 1) {
            zs = mul(zs, single_on(Z2, q, p.n));
        }
    }
    return mul(xs, zs);
}

Mat hermitian_form(const PauliProduct &p) {
    int w = std::popcount(p.xs & p.zs) % 4;
    cd phase = std::pow(cd(0, 1), w);
    return scale(xz_form(p), phase);
}

Mat gate_matrix(const Gate &g, uint32_t n) {
    size_t d = size_t{1} << n;
    Mat u(d, std::vector<cd>(d));
    if (g.kind == GateKind::H) {
        const double s = 1 / std::sqrt(2.0);
        Mat h = {{s, s}, {s, -s}};
        return single_on(h, g.a, n);
    }
    for (size_t i = 0; i < d; i++) {
        size_t j = i;
        if (g.kind == GateKind::CNOT) {
            if ((i >> g.a) & 1) {
                j = i ^ (size_t{1} << g.b);
            }
        } else {
            size_t da = (i >> g.a) & 1;
            size_t db = (i >> g.b) & 1;
            if (da != db) {
                j = i ^ (size_t{1} << g.a) ^ (size_t{1} << g.b);
            }
        }
        u[j][i] = 1;
    }
    return u;
}

std::vector<PauliProduct> all_paulis(uint32_t n) {
    std::vector<PauliProduct> out;
    for (uint64_t x = 0; x < (1u << n); x++) {
        for (uint64_t z = 0; z < (1u << n); z++) {
            out.emplace_back(n, x, z);
        }
    }
    return out;
}

std::vector<Gate> all_gates(uint32_t n) {
    std::vector<Gate> out;
    for (uint32_t a = 0; a < n; a++) {
        out.push_back(Gate::hadamard(a));
        for (uint32_t b = 0; b < n; b++) {
            if (a != b) {
                out.push_back(Gate::cnot(a, b));
                out.push_back(Gate::swap(a, b));
            }
        }
    }
    return out;
}

}  // namespace

TEST(symplectic, string_round_trip) {
    auto p = PauliProduct::from_str("IXZY");
    ASSERT_EQ(p.n, 4u);
    ASSERT_EQ(p.xs, 0b1010u);
    ASSERT_EQ(p.zs, 0b1100u);
    ASSERT_EQ(p.str(), "IXZY");
    ASSERT_EQ(p.weight(), 3u);
    ASSERT_THROW(PauliProduct::from_str("XQ"), std::invalid_argument);
}

TEST(symplectic, commutes_examples) {
    ASSERT_FALSE(commutes(PauliProduct::from_str("X"), PauliProduct::from_str("Z")));
    ASSERT_TRUE(commutes(PauliProduct::from_str("X"), PauliProduct::from_str("X")));
    ASSERT_TRUE(commutes(PauliProduct::from_str("XXXX"), PauliProduct::from_str("ZZZZ")));
    ASSERT_THROW(commutes(PauliProduct::from_str("X"), PauliProduct::from_str("XX")), std::invalid_argument);
}

TEST(symplectic, commutes_is_symmetric_exhaustive) {
    for (uint32_t n = 1; n <= 3; n++) {
        for (const auto &p : all_paulis(n)) {
            for (const auto &q : all_paulis(n)) {
                ASSERT_EQ(commutes(p, q), commutes(q, p));
                bool dense = close(mul(xz_form(p), xz_form(q)), mul(xz_form(q), xz_form(p)));
                ASSERT_EQ(commutes(p, q), dense) << p.str() << " " << q.str();
            }
        }
    }
}

TEST(symplectic, multiply_examples) {
    auto p = PauliProduct::from_str("XZY");
    auto r = multiply(PauliProduct::identity(3), p);
    ASSERT_EQ(r.pauli, p);
    ASSERT_FALSE(r.sign);
    r = multiply(PauliProduct::from_str("Z"), PauliProduct::from_str("X"));
    ASSERT_EQ(r.pauli.str(), "Y");
    ASSERT_TRUE(r.sign);
    r = multiply(PauliProduct::from_str("XXII"), PauliProduct::from_str("ZIZI"));
    ASSERT_EQ(r.pauli.xs, 0b0011u);
    ASSERT_EQ(r.pauli.zs, 0b0101u);
    ASSERT_FALSE(r.sign);
}

TEST(symplectic, multiply_matches_dense_table) {
    for (uint32_t n = 1; n <= 2; n++) {
        for (const auto &p : all_paulis(n)) {
            for (const auto &q : all_paulis(n)) {
                auto r = multiply(p, q);
                Mat expected = scale(xz_form(r.pauli), r.sign ? -1 : 1);
                ASSERT_TRUE(close(mul(xz_form(p), xz_form(q)), expected)) << p.str() << "*" << q.str();
            }
        }
    }
}

TEST(symplectic, multiply_signs_compose_associatively) {
    auto ps = all_paulis(3);
    for (const auto &a : ps) {
        for (const auto &b : ps) {
            auto ab = multiply(a, b);
            for (const auto &c : ps) {
                auto left = multiply(ab.pauli, c);
                auto bc = multiply(b, c);
                auto right = multiply(a, bc.pauli);
                ASSERT_EQ(left.pauli, right.pauli);
                ASSERT_EQ(ab.sign ^ left.sign, bc.sign ^ right.sign);
            }
        }
    }
}

TEST(symplectic, conjugate_examples) {
    auto r = conjugate_by_gate(PauliProduct::from_str("XI"), Gate::cnot(0, 1));
    ASSERT_EQ(r.pauli.str(), "XX");
    ASSERT_FALSE(r.sign);
    r = conjugate_by_gate(PauliProduct::from_str("Y"), Gate::hadamard(0));
    ASSERT_EQ(r.pauli.str(), "Y");
    ASSERT_TRUE(r.sign);
    r = conjugate_by_gate(PauliProduct::from_str("ZZ"), Gate::cnot(0, 1));
    ASSERT_EQ(r.pauli.str(), "IZ");
    ASSERT_FALSE(r.sign);
    ASSERT_THROW(conjugate_by_gate(PauliProduct::from_str("ZZ"), Gate::cnot(0, 2)), std::out_of_range);
}

TEST(symplectic, conjugate_matches_dense_unitary) {
    for (uint32_t n = 1; n <= 3; n++) {
        for (const auto &g : all_gates(n)) {
            Mat u = gate_matrix(g, n);
            for (const auto &p : all_paulis(n)) {
                Mat conj = mul(mul(u, xz_form(p)), dagger(u));
                auto r = conjugate_by_gate(p, g);
                ASSERT_TRUE(close(conj, scale(xz_form(r.pauli), r.sign ? -1 : 1))) << p.str();
                Mat hconj = mul(mul(u, hermitian_form(p)), dagger(u));
                auto h = hermitian_conjugate(p, g);
                ASSERT_TRUE(close(hconj, scale(hermitian_form(h.pauli), h.sign ? -1 : 1))) << p.str();
            }
        }
    }
}

TEST(symplectic, conjugation_preserves_commutation) {
    for (uint32_t n = 1; n <= 3; n++) {
        auto ps = all_paulis(n);
        for (const auto &g : all_gates(n)) {
            for (const auto &p : ps) {
                for (const auto &q : ps) {
                    ASSERT_EQ(commutes(p, q),
                              commutes(conjugate_by_gate(p, g).pauli, conjugate_by_gate(q, g).pauli));
                }
            }
        }
    }
}

TEST(symplectic, hermitian_multiply_matches_dense) {
    for (uint32_t n = 1; n <= 3; n++) {
        for (const auto &p : all_paulis(n)) {
            for (const auto &q : all_paulis(n)) {
                if (!commutes(p, q)) {
                    ASSERT_THROW(hermitian_multiply(p, q), std::invalid_argument);
                    continue;
                }
                auto r = hermitian_multiply(p, q);
                Mat expected = scale(hermitian_form(r.pauli), r.sign ? -1 : 1);
                ASSERT_TRUE(close(mul(hermitian_form(p), hermitian_form(q)), expected));
            }
        }
    }
    // CNOT maps YY to -XZ in Hermitian form.
    auto c = hermitian_conjugate(PauliProduct::from_str("YY"), Gate::cnot(0, 1));
    ASSERT_EQ(c.pauli.str(), "XZ");
    ASSERT_TRUE(c.sign);
}

TEST(symplectic, flip_pattern_examples) {
    auto q = GeneratorMatrix::from_strs({"XXXX", "ZZZZ", "IIZZ"});
    ASSERT_EQ(flip_pattern(q, PauliProduct::identity(4)), 0u);
    ASSERT_EQ(flip_pattern(q, PauliProduct::from_str("XIII")), 0b010u);
    ASSERT_EQ(flip_pattern(q, PauliProduct::from_str("IIZI")), 0b001u);
    ASSERT_EQ(flip_pattern(q, PauliProduct::from_str("IIXI")), 0b110u);
}

TEST(symplectic, flip_pattern_is_linear) {
    auto q = GeneratorMatrix::from_strs({"XXX", "ZZI", "IZZ"});
    for (const auto &a : all_paulis(3)) {
        for (const auto &b : all_paulis(3)) {
            ASSERT_EQ(flip_pattern(q, multiply(a, b).pauli), flip_pattern(q, a) ^ flip_pattern(q, b));
        }
    }
}

TEST(symplectic, generator_validation) {
    GeneratorMatrix::from_strs({"XXXX", "ZZZZ", "IIZZ"}).validate();
    ASSERT_THROW(GeneratorMatrix::from_strs({"XI", "ZI"}).validate(), std::invalid_argument);
    ASSERT_THROW(GeneratorMatrix::from_strs({"XX", "XX"}).validate(), std::invalid_argument);
}

TEST(symplectic, gf2_span_expresses_combinations) {
    Gf2Span span;
    std::vector<PauliProduct> rows = {PauliProduct::from_str("XXII"), PauliProduct::from_str("IZZI"),
                                      PauliProduct::from_str("YIIY"), PauliProduct::from_str("IIXX")};
    for (const auto &r : rows) {
        ASSERT_TRUE(span.insert(r));
    }
    for (uint64_t m = 0; m < 16; m++) {
        PauliProduct acc = PauliProduct::identity(4);
        for (int i = 0; i < 4; i++) {
            if ((m >> i) & 1) {
                acc = multiply(acc, rows[i]).pauli;
            }
        }
        uint64_t got = 0;
        ASSERT_TRUE(span.express(acc, &got));
        ASSERT_EQ(got, m);
    }
    uint64_t ignored = 0;
    ASSERT_FALSE(span.express(PauliProduct::from_str("ZIII"), &ignored));
}
