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

#ifndef POSTSEL_DECODE_HPP
#define POSTSEL_DECODE_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "postsel/gates.hpp"

namespace postsel {

/// Decodes one block carrying `terminal` plus `incoming` on each qubit, using the
/// inverse encoder with physical gate errors. Returns the error left on the data qubit.
template <typename T>
LocalQubitError<T> decode_step(const CosetErrorModel<T> &terminal, const LocalQubitError<T> &incoming,
                               const GateErrorSet<T> &phys, Spectator spectator) {
    if (terminal.spectator != spectator) {
        throw std::invalid_argument("Terminal model and decode spectator disagree.");
    }
    const auto &net = synthesize_encoding_network(spectator);
    const int ref = 100;
    auto blk = detail::block_labels(0);
    LabeledState<T> ws;
    add_block_with_reference(ws, net, ref, blk);
    ws.error(terminal.location(), {blk[0], blk[1], blk[2], blk[3]});
    if (!is_zero(incoming.total())) {
        auto in = incoming.location();
        for (int q : blk) {
            ws.error(in, {q});
        }
    }
    decode_block(ws, net, blk, &phys);
    int d = blk[net.data];
    std::vector<PauliProduct> ideal{ws.pauli({{ref, 'X'}, {d, 'X'}}), ws.pauli({{ref, 'Z'}, {d, 'Z'}})};
    return LocalQubitError<T>::from_location(detail::reference_errors(ws, ideal, {d}));
}

template <typename T>
struct DecodeChainReport {
    std::vector<LocalQubitError<T>> levels;
    std::vector<double> totals;
    double bound = 0;
};

/// Max total over the computed levels plus the last decrease, if any.
inline double decode_bound(const std::vector<double> &totals) {
    if (totals.empty()) {
        return 0;
    }
    double hi = *std::max_element(totals.begin(), totals.end());
    double step = 0;
    if (totals.size() >= 2) {
        step = std::max(0.0, totals[totals.size() - 2] - totals.back());
    }
    return hi + step;
}

/// Bottom-up decoding through every computed level, each with its own terminal model.
template <typename T>
DecodeChainReport<T> decode_chain(const std::vector<LevelReport<T>> &levels, const GateErrorSet<T> &phys) {
    if (levels.empty()) {
        throw std::invalid_argument("decode_chain needs at least one level.");
    }
    DecodeChainReport<T> out;
    LocalQubitError<T> d;
    for (const auto &lvl : levels) {
        d = decode_step(lvl.terminal, d, phys, lvl.spectator);
        out.levels.push_back(d);
        out.totals.push_back(d.total_probability());
    }
    out.bound = decode_bound(out.totals);
    return out;
}

/// One cnot plus the two measurements of a physical Bell measurement.
inline double bell_measurement_error(const PhysicalErrorParams &phys) {
    return phys.p_cnot + 2 * phys.p_meas;
}

struct InjectionReport {
    double special = 0;
    double decode = 0;
    double bell_measurement = 0;
    double total = 0;
    double distillation_threshold = 0.35;
    bool below_threshold = true;
};

inline InjectionReport injection_error(double decode_bound, const PhysicalErrorParams &phys) {
    InjectionReport r;
    r.special = phys.p_special;
    r.decode = decode_bound;
    r.bell_measurement = bell_measurement_error(phys);
    r.total = r.special + r.decode + r.bell_measurement;
    r.below_threshold = r.total < r.distillation_threshold;
    return r;
}

struct BudgetReport {
    double bell_measurement = 0;
    double memory = 0;
    double decode = 0;
    double total = 0;
    double tolerance = 0;
    bool pass = true;
};

/// Error budget of one teleported step of an outer code: Bell measurement, memory,
/// and decoding on both sides.
inline BudgetReport budget_check(double decode_bound, const PhysicalErrorParams &phys, double memory_error,
                                 double code_tolerance) {
    BudgetReport r;
    r.bell_measurement = bell_measurement_error(phys);
    r.memory = memory_error;
    r.decode = 2 * decode_bound;
    r.total = r.bell_measurement + r.memory + r.decode;
    r.tolerance = code_tolerance;
    r.pass = r.total < code_tolerance;
    return r;
}

template <typename T>
nlohmann::ordered_json decode_chain_to_json(const DecodeChainReport<T> &r) {
    auto rows = nlohmann::ordered_json::array();
    for (size_t k = 0; k < r.levels.size(); k++) {
        const auto &d = r.levels[k];
        double norm = 1 + to_double(d.total());
        rows.push_back({{"level", k + 1},
                        {"X", to_double(d.e_x) / norm},
                        {"Z", to_double(d.e_z) / norm},
                        {"Y", to_double(d.e_y) / norm},
                        {"total", r.totals[k]}});
    }
    return {{"levels", rows}, {"bound", r.bound}};
}

inline nlohmann::ordered_json injection_to_json(const InjectionReport &r) {
    return {{"special", r.special},
            {"decode", r.decode},
            {"bell_measurement", r.bell_measurement},
            {"total", r.total},
            {"distillation_threshold", r.distillation_threshold},
            {"below_threshold", r.below_threshold}};
}

inline nlohmann::ordered_json budget_to_json(const BudgetReport &r) {
    return {{"bell_measurement", r.bell_measurement},
            {"memory", r.memory},
            {"decode", r.decode},
            {"total", r.total},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

}  // namespace postsel

#endif
