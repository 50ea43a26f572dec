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

#ifndef POSTSEL_INDFIT_HPP
#define POSTSEL_INDFIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "postsel/bellprep.hpp"

namespace postsel {

/// Bits 0..2: flips of the block generators; bit 3: anticommutes with X_L; bit 4: with Z_L.
inline uint8_t coset_signature(Spectator s, size_t c) {
    const auto &table = CosetTable::get(s);
    auto p = block_pauli(table.members[c][0]);
    auto gens = block_stabilizer(s);
    uint8_t out = 0;
    for (int i = 0; i < 3; i++) {
        if (!commutes(p, gens[i])) {
            out |= (uint8_t)(1 << i);
        }
    }
    if (!commutes(p, logical_x())) {
        out |= 8;
    }
    if (!commutes(p, logical_z())) {
        out |= 16;
    }
    return out;
}

/// Bell syndrome of origin coset c1 times destination coset c2.
inline uint32_t pair_syndrome(Spectator s, size_t c1, size_t c2) {
    static const auto table = [] {
        std::array<std::array<uint8_t, 32>, 2> t{};
        for (int k = 0; k < 2; k++) {
            for (size_t c = 0; c < 32; c++) {
                t[k][c] = coset_signature(k ? Spectator::Plus : Spectator::Zero, c);
            }
        }
        return t;
    }();
    uint8_t a = table[s == Spectator::Plus][c1];
    uint8_t b = table[s == Spectator::Plus][c2];
    uint8_t l = (uint8_t)((a ^ b) >> 3);
    return (uint32_t)(a & 7) | (uint32_t)(b & 7) << 3 | (uint32_t)l << 6;
}

/// The four (c1, c2) pairs producing each Bell syndrome, in increasing c1 order.
inline const std::array<std::array<std::pair<uint8_t, uint8_t>, 4>, 256> &pairs_by_syndrome(Spectator s) {
    auto build = [](Spectator sp) {
        std::array<std::array<std::pair<uint8_t, uint8_t>, 4>, 256> out{};
        std::array<int, 256> fill{};
        for (size_t c1 = 0; c1 < 32; c1++) {
            for (size_t c2 = 0; c2 < 32; c2++) {
                uint32_t syn = pair_syndrome(sp, c1, c2);
                if (fill[syn] == 4) {
                    throw std::logic_error("More than four coset pairs share a syndrome.");
                }
                out[syn][fill[syn]++] = {(uint8_t)c1, (uint8_t)c2};
            }
        }
        return out;
    };
    static const auto zero = build(Spectator::Zero);
    static const auto plus = build(Spectator::Plus);
    return s == Spectator::Zero ? zero : plus;
}

/// Minimum additive weight over each coset's members.
inline std::array<double, 32> coset_weights(Spectator s, const PauliWeights &w) {
    const auto &table = CosetTable::get(s);
    std::array<double, 32> out{};
    for (size_t c = 0; c < 32; c++) {
        double best = std::numeric_limits<double>::infinity();
        for (uint8_t code : table.members[c]) {
            best = std::min(best, w.weight(block_pauli(code)));
        }
        out[c] = best;
    }
    return out;
}

/// Minimum weight of the 8-qubit Pauli products producing each Bell syndrome.
inline std::vector<double> syndrome_weights(Spectator s, const PauliWeights &w) {
    auto cw = coset_weights(s, w);
    const auto &pairs = pairs_by_syndrome(s);
    std::vector<double> out(256);
    for (size_t syn = 0; syn < 256; syn++) {
        double best = std::numeric_limits<double>::infinity();
        for (auto [c1, c2] : pairs[syn]) {
            best = std::min(best, cw[c1] + cw[c2]);
        }
        out[syn] = best;
    }
    return out;
}

namespace detail {

inline bool weights_tie(double a, double b) {
    if (a == b) {
        return true;
    }
    if (std::isinf(a) || std::isinf(b)) {
        return false;
    }
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool weight_less(double a, double b) {
    return a < b && !weights_tie(a, b);
}

}  // namespace detail

template <typename T>
struct PairAttribution {
    Spectator spectator = Spectator::Zero;
    std::vector<T> e_pairs = std::vector<T>(32 * 32, T(0));
    std::vector<double> syndrome_weight;

    T &at(size_t c1, size_t c2) {
        return e_pairs[c1 * 32 + c2];
    }
    const T &at(size_t c1, size_t c2) const {
        return e_pairs[c1 * 32 + c2];
    }
    uint32_t syndrome(size_t c1, size_t c2) const {
        return pair_syndrome(spectator, c1, c2);
    }
};

/// How a syndrome's likelihood is assigned when several coset pairs reach its minimum weight.
/// Proportional shares it by the product of the two single-block likelihoods L(s(c1,0)) L(s(0,c2)),
/// falling back to Split when all of those vanish.
enum class TiePolicy : uint8_t { Proportional, Split, FirstPair };

inline const char *tie_policy_name(TiePolicy t) {
    switch (t) {
        case TiePolicy::Split:
            return "split";
        case TiePolicy::FirstPair:
            return "first-pair";
        default:
            return "proportional";
    }
}

/// Assigns each syndrome's likelihood to its minimum-weight coset pair.
template <OrderedScalar T>
PairAttribution<T> attribute_pairs(Spectator s, const std::vector<T> &dist, const PauliWeights &w,
                                   TiePolicy ties = TiePolicy::Proportional) {
    if (dist.size() != 256) {
        throw std::invalid_argument("Bell model must have 256 syndromes.");
    }
    PairAttribution<T> out;
    out.spectator = s;
    out.syndrome_weight = syndrome_weights(s, w);
    auto cw = coset_weights(s, w);
    const auto &pairs = pairs_by_syndrome(s);
    for (size_t syn = 0; syn < 256; syn++) {
        if (is_zero(dist[syn])) {
            continue;
        }
        double best = out.syndrome_weight[syn];
        std::vector<std::pair<uint8_t, uint8_t>> winners;
        for (auto [c1, c2] : pairs[syn]) {
            if (detail::weights_tie(cw[c1] + cw[c2], best)) {
                winners.emplace_back(c1, c2);
            }
        }
        if (ties == TiePolicy::FirstPair) {
            winners.resize(1);
        }
        if (ties == TiePolicy::Proportional && winners.size() > 1) {
            std::vector<T> prior;
            T sum(0);
            for (auto [c1, c2] : winners) {
                prior.push_back(dist[pair_syndrome(s, c1, 0)] * dist[pair_syndrome(s, 0, c2)]);
                sum += prior.back();
            }
            if (T(0) < sum) {
                for (size_t i = 0; i < winners.size(); i++) {
                    out.at(winners[i].first, winners[i].second) = dist[syn] * prior[i] / sum;
                }
                continue;
            }
        }
        T share = dist[syn] / T((int)winners.size());
        for (auto [c1, c2] : winners) {
            out.at(c1, c2) = share;
        }
    }
    return out;
}

template <OrderedScalar T>
PairAttribution<T> attribute_pairs(const ComputedBellModel<T> &m, const PauliWeights &w,
                                   TiePolicy ties = TiePolicy::Proportional) {
    return attribute_pairs(m.spectator, m.dist, w, ties);
}

template <typename T>
struct BellErrorModel {
    CosetErrorModel<T> origin;
    CosetErrorModel<T> destination;
    double quality_min = 1;
    double quality_max = 1;
};

/// Smallest independent block likelihoods satisfying every ratio constraint, normalized
/// so the identity cosets have likelihood 1.
template <OrderedScalar T>
BellErrorModel<T> fit_independent(const PairAttribution<T> &attr, const PauliWeights &w) {
    const T &e0 = attr.at(0, 0);
    if (!(T(0) < e0)) {
        throw ZeroAcceptanceError("Zero-syndrome likelihood is zero; cannot fit an independent model.");
    }
    BellErrorModel<T> out;
    out.origin = CosetErrorModel<T>(attr.spectator, w);
    out.destination = CosetErrorModel<T>(attr.spectator, w);
    const auto &sw = attr.syndrome_weight;
    for (size_t c = 1; c < 32; c++) {
        T best_o(0);
        T best_d(0);
        for (size_t other = 0; other < 32; other++) {
            // origin coset c against destination coset `other`
            const T &ref_o = attr.at(0, other);
            if (T(0) < ref_o && detail::weight_less(sw[attr.syndrome(0, other)], sw[attr.syndrome(c, other)])) {
                T r = attr.at(c, other) / ref_o;
                if (best_o < r) {
                    best_o = r;
                }
            }
            const T &ref_d = attr.at(other, 0);
            if (T(0) < ref_d && detail::weight_less(sw[attr.syndrome(other, 0)], sw[attr.syndrome(other, c)])) {
                T r = attr.at(other, c) / ref_d;
                if (best_d < r) {
                    best_d = r;
                }
            }
        }
        out.origin.likelihoods[c] = best_o;
        out.destination.likelihoods[c] = best_d;
    }
    return out;
}

/// Syndrome distribution induced by independent block models, unnormalized.
template <typename T>
std::vector<T> induced_distribution(Spectator s, const CosetErrorModel<T> &origin, const CosetErrorModel<T> &dest) {
    std::vector<T> out(256, T(0));
    for (size_t c1 = 0; c1 < 32; c1++) {
        if (is_zero(origin.likelihoods[c1])) {
            continue;
        }
        for (size_t c2 = 0; c2 < 32; c2++) {
            out[pair_syndrome(s, c1, c2)] += origin.likelihoods[c1] * dest.likelihoods[c2];
        }
    }
    return out;
}

/// Min and max of L_ind(s) / L(s) over syndromes with L(s) > 0, both normalized at s = 0.
template <OrderedScalar T>
std::pair<double, double> quality(const BellErrorModel<T> &fit, Spectator s, const std::vector<T> &dist) {
    auto ind = induced_distribution(s, fit.origin, fit.destination);
    if (!(T(0) < ind[0]) || !(T(0) < dist[0])) {
        throw ZeroAcceptanceError("Zero-syndrome likelihood is zero; quality undefined.");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t syn = 0; syn < 256; syn++) {
        if (!(T(0) < dist[syn])) {
            continue;
        }
        double r = to_double((ind[syn] / ind[0]) / (dist[syn] / dist[0]));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

/// Full heuristic: attribution, fit, and quality.
template <OrderedScalar T>
BellErrorModel<T> fit_bell_model(const ComputedBellModel<T> &m, const PauliWeights &w,
                                 TiePolicy ties = TiePolicy::Proportional) {
    auto fit = fit_independent(attribute_pairs(m, w, ties), w);
    std::tie(fit.quality_min, fit.quality_max) = quality(fit, m.spectator, m.dist);
    return fit;
}

template <typename T>
nlohmann::ordered_json bell_error_model_to_json(const BellErrorModel<T> &m) {
    return {{"origin", coset_model_to_json(m.origin)},
            {"destination", coset_model_to_json(m.destination)},
            {"quality_min", m.quality_min},
            {"quality_max", m.quality_max}};
}

}  // namespace postsel

#endif
