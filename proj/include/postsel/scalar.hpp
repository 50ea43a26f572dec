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

#ifndef POSTSEL_SCALAR_HPP
#define POSTSEL_SCALAR_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace postsel {

using BigFloat = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::cpp_rational;

/// Sets the working precision of BigFloat values created afterwards.
/// Process-wide; call before starting a computation.
inline void set_bigfloat_digits(unsigned digits) {
    BigFloat::default_precision(digits);
}

struct PolyContext {
    int degree_cap = 4;
    double e_max = 1.0 / 400;
};

inline PolyContext &poly_context() {
    thread_local PolyContext ctx;
    return ctx;
}

/// Installs a polynomial context for the current thread and restores the old one on exit.
class PolyScope {
   public:
    PolyScope(int degree_cap, double e_max);
    ~PolyScope() {
        poly_context() = saved_;
    }
    PolyScope(const PolyScope &) = delete;
    PolyScope &operator=(const PolyScope &) = delete;

   private:
    PolyContext saved_;
};

/// Truncated power series in one error parameter e with a certified tail.
///
/// The represented value v(e) satisfies |v(e) - sum_k c[k] e^k| <= rem * e^(cap+1)
/// for all 0 <= e <= e_max, with cap and e_max taken from poly_context().
class TruncatedPoly {
   public:
    static constexpr int MAX_DEGREE = 12;

    std::array<double, MAX_DEGREE + 1> c{};
    double rem = 0;

    TruncatedPoly() = default;
    TruncatedPoly(double constant) {
        c[0] = constant;
    }
    TruncatedPoly(int constant) {
        c[0] = constant;
    }

    static TruncatedPoly monomial(double coef, int degree) {
        TruncatedPoly out;
        int cap = poly_context().degree_cap;
        if (degree <= cap) {
            out.c[degree] = coef;
        } else {
            out.rem = std::abs(coef) * std::pow(poly_context().e_max, degree - cap - 1);
        }
        return out;
    }

    /// Lowest degree with a nonzero coefficient; cap+1 if only the tail is nonzero; -1 if zero.
    int min_degree() const {
        int cap = poly_context().degree_cap;
        for (int k = 0; k <= cap; k++) {
            if (c[k] != 0) {
                return k;
            }
        }
        return rem != 0 ? cap + 1 : -1;
    }

    double eval(double e) const {
        int cap = poly_context().degree_cap;
        double acc = 0;
        for (int k = cap; k >= 0; k--) {
            acc = acc * e + c[k];
        }
        return acc;
    }

    /// Upper bound on |v(e)| over [0, e_max].
    double abs_bound() const {
        const auto &ctx = poly_context();
        double acc = 0;
        double p = 1;
        for (int k = 0; k <= ctx.degree_cap; k++) {
            acc += std::abs(c[k]) * p;
            p *= ctx.e_max;
        }
        return acc + rem * p;
    }

    /// Lower bound on v(e) over [0, e_max].
    double lower_bound() const {
        const auto &ctx = poly_context();
        double acc = c[0];
        double p = ctx.e_max;
        for (int k = 1; k <= ctx.degree_cap; k++) {
            acc -= std::abs(c[k]) * p;
            p *= ctx.e_max;
        }
        return acc - rem * p;
    }

    bool is_zero() const {
        if (rem != 0) {
            return false;
        }
        for (double v : c) {
            if (v != 0) {
                return false;
            }
        }
        return true;
    }

    TruncatedPoly &operator+=(const TruncatedPoly &o) {
        for (int k = 0; k <= MAX_DEGREE; k++) {
            c[k] += o.c[k];
        }
        rem += o.rem;
        return *this;
    }

    TruncatedPoly &operator-=(const TruncatedPoly &o) {
        for (int k = 0; k <= MAX_DEGREE; k++) {
            c[k] -= o.c[k];
        }
        rem += o.rem;
        return *this;
    }

    TruncatedPoly &operator*=(const TruncatedPoly &o) {
        *this = *this * o;
        return *this;
    }

    TruncatedPoly &operator/=(const TruncatedPoly &o) {
        *this = *this / o;
        return *this;
    }

    friend TruncatedPoly operator+(TruncatedPoly a, const TruncatedPoly &b) {
        a += b;
        return a;
    }

    friend TruncatedPoly operator-(TruncatedPoly a, const TruncatedPoly &b) {
        a -= b;
        return a;
    }

    friend TruncatedPoly operator*(const TruncatedPoly &a, const TruncatedPoly &b) {
        const auto &ctx = poly_context();
        int cap = ctx.degree_cap;
        TruncatedPoly out;
        std::array<double, 2 * MAX_DEGREE + 1> full{};
        for (int i = 0; i <= cap; i++) {
            if (a.c[i] == 0) {
                continue;
            }
            for (int j = 0; j <= cap; j++) {
                full[i + j] += a.c[i] * b.c[j];
            }
        }
        for (int k = 0; k <= cap; k++) {
            out.c[k] = full[k];
        }
        double tail = 0;
        double p = 1;
        for (int k = cap + 1; k <= 2 * cap; k++) {
            tail += std::abs(full[k]) * p;
            p *= ctx.e_max;
        }
        double top = std::pow(ctx.e_max, cap + 1);
        out.rem = tail + a.rem * b.abs_bound() + b.rem * a.abs_bound() + a.rem * b.rem * top;
        return out;
    }

    friend TruncatedPoly operator/(const TruncatedPoly &f, const TruncatedPoly &g) {
        const auto &ctx = poly_context();
        int cap = ctx.degree_cap;
        if (g.c[0] == 0) {
            throw std::domain_error("Truncated series division by a series with zero constant term.");
        }
        TruncatedPoly q;
        for (int k = 0; k <= cap; k++) {
            double acc = f.c[k];
            for (int j = 0; j < k; j++) {
                acc -= q.c[j] * g.c[k - j];
            }
            q.c[k] = acc / g.c[0];
        }
        // f - q g vanishes below degree cap+1; bound what is left and divide by min g.
        std::array<double, 2 * MAX_DEGREE + 1> qg{};
        for (int i = 0; i <= cap; i++) {
            for (int j = 0; j <= cap; j++) {
                qg[i + j] += q.c[i] * g.c[j];
            }
        }
        double tail = 0;
        double p = 1;
        for (int k = cap + 1; k <= 2 * cap; k++) {
            tail += std::abs(qg[k]) * p;
            p *= ctx.e_max;
        }
        double num = tail + f.rem + q.abs_bound() * g.rem;
        double g_low = g.lower_bound();
        if (num != 0) {
            if (!(g_low > 0)) {
                throw std::domain_error("Divisor series not bounded away from zero on [0, e_max].");
            }
            q.rem = num / g_low;
        }
        return q;
    }

    friend bool operator==(const TruncatedPoly &a, const TruncatedPoly &b) {
        return a.c == b.c && a.rem == b.rem;
    }

    std::string str() const {
        std::ostringstream out;
        out.precision(17);
        bool any = false;
        int cap = poly_context().degree_cap;
        for (int k = 0; k <= cap; k++) {
            if (c[k] == 0) {
                continue;
            }
            if (any) {
                out << " + ";
            }
            out << c[k];
            if (k) {
                out << "*e^" << k;
            }
            any = true;
        }
        if (rem != 0) {
            out << (any ? " + " : "") << "O(" << rem << "*e^" << cap + 1 << ")";
            any = true;
        }
        if (!any) {
            out << "0";
        }
        return out.str();
    }
};

inline PolyScope::PolyScope(int degree_cap, double e_max) : saved_(poly_context()) {
    if (degree_cap < 1 || degree_cap > TruncatedPoly::MAX_DEGREE) {
        throw std::invalid_argument("Polynomial degree cap out of range.");
    }
    if (!(e_max > 0) || !(e_max < 1)) {
        throw std::invalid_argument("Polynomial e_max must be in (0, 1).");
    }
    poly_context() = {degree_cap, e_max};
}

/// Scalars that support the ring operations used by the likelihood engine.
template <typename T>
concept LikelihoodScalar = requires(T a, T b) {
    { a + b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a / b } -> std::convertible_to<T>;
    T(0);
    T(1);
};

/// Likelihood scalars that are totally ordered, as needed by fitting.
template <typename T>
concept OrderedScalar = LikelihoodScalar<T> && requires(T a, T b) {
    { a < b } -> std::convertible_to<bool>;
};

inline double to_double(double v) {
    return v;
}
inline double to_double(const BigFloat &v) {
    return v.convert_to<double>();
}
inline double to_double(const Rational &v) {
    return v.convert_to<double>();
}
/// Evaluates at the context's e_max bound.
inline double to_double(const TruncatedPoly &v) {
    return v.eval(poly_context().e_max);
}

inline bool is_zero(double v) {
    return v == 0;
}
inline bool is_zero(const BigFloat &v) {
    return v.is_zero();
}
inline bool is_zero(const Rational &v) {
    return v.is_zero();
}
inline bool is_zero(const TruncatedPoly &v) {
    return v.is_zero();
}

/// Shortest decimal string that round-trips the double.
inline std::string shortest_decimal(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Exact value of the decimal literal a double was written as (0.01 means 1/100).
inline Rational rational_from_decimal(const std::string &text) {
    std::string mant = text;
    long exp10 = 0;
    auto epos = mant.find_first_of("eE");
    if (epos != std::string::npos) {
        exp10 = std::stol(mant.substr(epos + 1));
        mant = mant.substr(0, epos);
    }
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg) {
        mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= (long)(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    boost::multiprecision::cpp_int num(mant.empty() ? std::string("0") : mant);
    boost::multiprecision::cpp_int den = 1;
    boost::multiprecision::cpp_int ten = 10;
    if (exp10 >= 0) {
        num *= boost::multiprecision::pow(ten, (unsigned)exp10);
    } else {
        den = boost::multiprecision::pow(ten, (unsigned)(-exp10));
    }
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

/// Converts a user-facing decimal parameter into the scalar type. For exact
/// and high-precision types the decimal literal is used, not its binary rounding.
template <typename T>
T from_decimal(double v) {
    if constexpr (std::is_same_v<T, double>) {
        return v;
    } else if constexpr (std::is_same_v<T, BigFloat>) {
        return BigFloat(shortest_decimal(v));
    } else if constexpr (std::is_same_v<T, Rational>) {
        return rational_from_decimal(shortest_decimal(v));
    } else {
        return T(v);
    }
}

inline std::string to_string(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
    return std::string(buf.data(), res.ptr);
}
inline std::string to_string(const BigFloat &v) {
    return v.str(std::max<unsigned>(BigFloat::default_precision(), 17), std::ios_base::scientific);
}
inline std::string to_string(const Rational &v) {
    return v.str();
}
inline std::string to_string(const TruncatedPoly &v) {
    return v.str();
}

}  // namespace postsel

#endif
