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

#ifndef POSTSEL_RUN_HPP
#define POSTSEL_RUN_HPP

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "postsel/decode.hpp"

namespace postsel {

enum class Backend : uint8_t { Double, BigFloat, Polynomial };

inline const char *backend_name(Backend b) {
    switch (b) {
        case Backend::BigFloat:
            return "bigfloat";
        case Backend::Polynomial:
            return "polynomial";
        default:
            return "double";
    }
}

/// Parses "+00" style strings or comma lists of plus/zero.
inline std::vector<Spectator> parse_schedule(const std::string &text) {
    std::vector<Spectator> out;
    if (text.find_first_of(",") != std::string::npos || text.find("plus") != std::string::npos ||
        text.find("zero") != std::string::npos) {
        std::stringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item == "plus" || item == "+") {
                out.push_back(Spectator::Plus);
            } else if (item == "zero" || item == "0") {
                out.push_back(Spectator::Zero);
            } else {
                throw std::invalid_argument("Unknown spectator '" + item + "'.");
            }
        }
        return out;
    }
    for (char c : text) {
        if (c == '+') {
            out.push_back(Spectator::Plus);
        } else if (c == '0') {
            out.push_back(Spectator::Zero);
        } else {
            throw std::invalid_argument(std::string("Unknown spectator character '") + c + "'.");
        }
    }
    return out;
}

inline std::string schedule_string(const std::vector<Spectator> &s) {
    std::string out;
    for (auto sp : s) {
        out += spectator_char(sp);
    }
    return out;
}

inline SacrificePolicy parse_sacrifice_policy(const std::string &name) {
    for (auto p : {SacrificePolicy::Raw, SacrificePolicy::CrossOrder, SacrificePolicy::Tree}) {
        if (name == sacrifice_policy_name(p)) {
            return p;
        }
    }
    throw std::invalid_argument("Unknown sacrifice policy '" + name + "'.");
}

inline TiePolicy parse_tie_policy(const std::string &name) {
    for (auto t : {TiePolicy::Proportional, TiePolicy::Split, TiePolicy::FirstPair}) {
        if (name == tie_policy_name(t)) {
            return t;
        }
    }
    throw std::invalid_argument("Unknown tie policy '" + name + "'.");
}

struct RunConfig {
    PhysicalErrorParams phys = PhysicalErrorParams::from_prep_cnot(0.01, 0.03);
    std::vector<Spectator> schedule = parse_schedule("+000+");
    Backend backend = Backend::Double;
    unsigned digits = 48;
    double failure_cutoff = 0.25;
    double memory_error = 0.004;
    double code_tolerance = 0.11;
    BellSchedule bell;
    TiePolicy ties = TiePolicy::Proportional;

    int levels() const {
        return (int)schedule.size();
    }

    void validate() const {
        phys.validate();
        if (schedule.empty()) {
            throw std::invalid_argument("At least one level is required.");
        }
        if (bell.cycles < 1) {
            throw std::invalid_argument("At least one purification cycle is required.");
        }
        if (backend == Backend::Polynomial) {
            throw std::invalid_argument("The polynomial backend is only available for formal-check.");
        }
    }
};

/// Thrown when a run cannot continue; names the stage that failed.
struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <OrderedScalar T>
struct PointResult {
    RunConfig config;
    std::vector<LevelReport<T>> levels;
    DecodeChainReport<T> decode;
    InjectionReport injection;
    BudgetReport budget;
};

template <OrderedScalar T>
PointResult<T> run_point(const RunConfig &cfg) {
    cfg.validate();
    PointResult<T> out;
    out.config = cfg;
    auto phys = uniform_physical_set<T>(cfg.phys);
    const GateErrorSet<T> *prev = &phys;
    for (int k = 0; k < cfg.levels(); k++) {
        try {
            out.levels.push_back(level_step(*prev, cfg.schedule[k], cfg.bell, cfg.ties));
        } catch (const ZeroAcceptanceError &e) {
            throw StageError("level " + std::to_string(k + 1) + ": " + e.what());
        }
        prev = &out.levels.back().gates;
    }
    try {
        out.decode = decode_chain(out.levels, phys);
    } catch (const ZeroAcceptanceError &e) {
        throw StageError(std::string("decode: ") + e.what());
    }
    out.injection = injection_error(out.decode.bound, cfg.phys);
    out.budget = budget_check(out.decode.bound, cfg.phys, cfg.memory_error, cfg.code_tolerance);
    return out;
}

inline nlohmann::ordered_json config_to_json(const RunConfig &c) {
    return {{"p_prep", c.phys.p_prep},
            {"p_meas", c.phys.p_meas},
            {"p_cnot", c.phys.p_cnot},
            {"p_hadamard", c.phys.p_hadamard},
            {"p_special", c.phys.p_special},
            {"levels", c.levels()},
            {"schedule", schedule_string(c.schedule)},
            {"backend", backend_name(c.backend)},
            {"digits", c.backend == Backend::BigFloat ? c.digits : 0},
            {"purification_cycles", c.bell.cycles},
            {"sacrifices", sacrifice_policy_name(c.bell.sacrifices)},
            {"ties", tie_policy_name(c.ties)},
            {"memory_error", c.memory_error},
            {"code_tolerance", c.code_tolerance}};
}

template <OrderedScalar T>
nlohmann::ordered_json point_to_json(const PointResult<T> &r) {
    auto levels = nlohmann::ordered_json::array();
    auto dj = decode_chain_to_json(r.decode);
    for (size_t k = 0; k < r.levels.size(); k++) {
        auto j = level_report_to_json(r.levels[k]);
        j["decode"] = dj["levels"][k];
        levels.push_back(j);
    }
    return {{"config", config_to_json(r.config)},
            {"levels", levels},
            {"decode_bound", r.decode.bound},
            {"injection", injection_to_json(r.injection)},
            {"budget", budget_to_json(r.budget)}};
}

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace detail

/// Human-readable per-level table.
template <OrderedScalar T>
std::string format_point_table(const PointResult<T> &r) {
    std::ostringstream out;
    const auto &c = r.config;
    out << "p_prep=" << c.phys.p_prep << " p_cnot=" << c.phys.p_cnot << " schedule=" << schedule_string(c.schedule)
        << " backend=" << backend_name(c.backend) << "\n";
    for (size_t k = 0; k < r.levels.size(); k++) {
        const auto &lvl = r.levels[k];
        auto s = lvl.summary();
        const auto &d = r.decode.levels[k];
        double dn = 1 + to_double(d.total());
        out << "level " << lvl.level << " (" << spectator_name(lvl.spectator) << ")\n";
        out << "  independence quality  " << detail::sci(lvl.quality_max) << "  (min " << detail::sci(lvl.quality_min)
            << ")\n";
        out << "  prep/meas     X " << detail::sci(s.prep_x) << "  Z " << detail::sci(s.prep_z) << "\n";
        out << "  cnot          X " << detail::sci(s.cnot_marginals.x) << "  Z " << detail::sci(s.cnot_marginals.z)
            << "  Y " << detail::sci(s.cnot_marginals.y) << "  total " << detail::sci(s.cnot_total) << "\n";
        out << "  hadamard      X " << detail::sci(s.hadamard_x) << "  Z " << detail::sci(s.hadamard_z) << "  Y "
            << detail::sci(s.hadamard_y) << "  total " << detail::sci(s.hadamard_total) << "\n";
        out << "  decode        X " << detail::sci(to_double(d.e_x) / dn) << "  Z "
            << detail::sci(to_double(d.e_z) / dn) << "  Y " << detail::sci(to_double(d.e_y) / dn) << "  total "
            << detail::sci(r.decode.totals[k]) << "\n";
    }
    out << "decode bound " << detail::sci(r.decode.bound) << "\n";
    out << "injection " << detail::sci(r.injection.total) << (r.injection.below_threshold ? " below " : " above ")
        << r.injection.distillation_threshold << "\n";
    out << "budget " << detail::sci(r.budget.total) << " vs " << r.budget.tolerance
        << (r.budget.pass ? " pass" : " fail") << "\n";
    return out.str();
}

struct PointOutput {
    nlohmann::ordered_json document;
    std::string table;
};

/// run_point on the configured backend.
inline PointOutput run_point_report(const RunConfig &cfg) {
    cfg.validate();
    if (cfg.backend == Backend::BigFloat) {
        set_bigfloat_digits(cfg.digits);
        auto r = run_point<BigFloat>(cfg);
        return {point_to_json(r), format_point_table(r)};
    }
    auto r = run_point<double>(cfg);
    return {point_to_json(r), format_point_table(r)};
}

struct GridConfig {
    std::vector<double> p_cnot = default_axis();
    std::vector<double> p_prep = default_axis();
    std::vector<double> extra_cnot{0.0707, 0.0354};
    std::vector<Spectator> schedule = parse_schedule("+000");
    double failure_cutoff = 0.25;
    BellSchedule bell;
    TiePolicy ties = TiePolicy::Proportional;
    unsigned threads = 0;

    /// Ten values, each half the next, topping out at 0.05.
    static std::vector<double> default_axis() {
        std::vector<double> out;
        for (int k = 9; k >= 0; k--) {
            out.push_back(0.05 / (double)(1 << k));
        }
        return out;
    }

    void validate() const {
        for (const auto *axis : {&p_cnot, &p_prep, &extra_cnot}) {
            for (double v : *axis) {
                if (!(v > 0) || !(v < 1)) {
                    throw std::invalid_argument("Grid probabilities must lie in (0, 1).");
                }
            }
        }
        if (p_cnot.empty() || p_prep.empty() || schedule.empty()) {
            throw std::invalid_argument("Grid axes and schedule must be nonempty.");
        }
    }
};

struct GridRow {
    double p_cnot = 0;
    double p_prep = 0;
    int level = 0;
    double max_gate_error = 0;
    double quality_max = 0;
    bool saturated = false;
    std::string status = "ok";

    auto key() const {
        return std::tie(p_prep, p_cnot, level);
    }
};

/// Runs one grid point level by level until the schedule ends or the cutoff is reached.
inline std::vector<GridRow> evaluate_grid_point(double p_cnot, double p_prep, const GridConfig &cfg) {
    std::vector<GridRow> rows;
    auto phys = uniform_physical_set<double>(PhysicalErrorParams::from_prep_cnot(p_prep, p_cnot));
    GateErrorSet<double> prev = phys;
    for (size_t k = 0; k < cfg.schedule.size(); k++) {
        GridRow row;
        row.p_cnot = p_cnot;
        row.p_prep = p_prep;
        row.level = (int)k + 1;
        try {
            auto r = level_step(prev, cfg.schedule[k], cfg.bell, cfg.ties);
            row.max_gate_error = r.summary().max_gate_error();
            row.quality_max = r.quality_max;
            row.saturated = !(row.max_gate_error < cfg.failure_cutoff);
            prev = std::move(r.gates);
        } catch (const ZeroAcceptanceError &e) {
            row.saturated = true;
            row.status = "zero-acceptance";
        }
        rows.push_back(row);
        if (row.saturated) {
            break;
        }
    }
    return rows;
}

/// All grid points on a worker pool; rows come back sorted by (p_prep, p_cnot, level).
inline std::vector<GridRow> run_grid(const GridConfig &cfg) {
    cfg.validate();
    std::vector<std::pair<double, double>> points;
    for (double pp : cfg.p_prep) {
        for (double pc : cfg.p_cnot) {
            points.emplace_back(pc, pp);
        }
        for (double pc : cfg.extra_cnot) {
            points.emplace_back(pc, pp);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::vector<std::vector<GridRow>> results(points.size());
    std::atomic<size_t> next{0};
    unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, (unsigned)points.size());
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; t++) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < points.size(); i = next++) {
                    results[i] = evaluate_grid_point(points[i].first, points[i].second, cfg);
                }
            });
        }
    }
    std::vector<GridRow> rows;
    for (auto &r : results) {
        rows.insert(rows.end(), r.begin(), r.end());
    }
    std::sort(rows.begin(), rows.end(), [](const GridRow &a, const GridRow &b) { return a.key() < b.key(); });
    return rows;
}

inline std::string grid_csv(const std::vector<GridRow> &rows) {
    std::ostringstream out;
    out << "p_cnot,p_prep,level,max_gate_error,quality_max,saturated,status\n";
    char buf[160];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6e,%.6e,%d,%.16e,%.16e,%d,%s\n", r.p_cnot, r.p_prep, r.level,
                      r.max_gate_error, r.quality_max, r.saturated ? 1 : 0, r.status.c_str());
        out << buf;
    }
    return out.str();
}

/// Whether the point is saturated at or before `level`.
inline bool saturated_by(const std::vector<GridRow> &rows, double p_cnot, double p_prep, int level) {
    for (const auto &r : rows) {
        if (r.p_cnot == p_cnot && r.p_prep == p_prep && r.level <= level && r.saturated) {
            return true;
        }
    }
    return false;
}

struct SaturationBoundary {
    double last_unsaturated = 0;
    double first_saturated = 0;
    bool found = false;
};

/// Along the row p_prep, the p_cnot interval where the level-`level` recursion first saturates.
inline SaturationBoundary saturation_boundary(const std::vector<GridRow> &rows, double p_prep, int level) {
    std::vector<double> cnots;
    for (const auto &r : rows) {
        if (r.p_prep == p_prep) {
            cnots.push_back(r.p_cnot);
        }
    }
    std::sort(cnots.begin(), cnots.end());
    cnots.erase(std::unique(cnots.begin(), cnots.end()), cnots.end());
    SaturationBoundary b;
    for (double pc : cnots) {
        if (saturated_by(rows, pc, p_prep, level)) {
            b.first_saturated = pc;
            b.found = true;
            return b;
        }
        b.last_unsaturated = pc;
    }
    return b;
}

struct FormalIssue {
    Spectator spectator = Spectator::Zero;
    uint32_t syndrome = 0;
    int expected = 0;
    int actual = 0;
    std::string kind;
};

struct FormalCheckReport {
    int degree_cap = 4;
    double e_max = 1e-4;
    int cycles = 2;
    bool pass = true;
    std::vector<FormalIssue> issues;
};

inline bool is_undetected_logical(uint32_t syndrome) {
    return (syndrome & 0x3F) == 0 && syndrome != 0;
}

/// Polynomial-backend Bell preparation with every error location at likelihood e.
/// Checks that each syndrome's lowest degree equals its minimum Pauli weight and that
/// undetected logical syndromes are at least second order.
inline FormalCheckReport run_formal_check(int degree_cap, double e_max, int cycles = 2,
                                          SacrificePolicy sacrifices = SacrificePolicy::Tree, bool noisy = true) {
    FormalCheckReport rep;
    rep.degree_cap = degree_cap;
    rep.e_max = e_max;
    rep.cycles = cycles;
    PolyScope scope(degree_cap, e_max);
    GateErrorSet<TruncatedPoly> g;
    if (noisy) {
        auto e = TruncatedPoly::monomial(1, 1);
        g.prep.set("X", e);
        g.prep.set("Z", e);
        g.meas.set("X", e);
        g.meas.set("Z", e);
        for (const auto &p : two_qubit_paulis()) {
            g.cnot.set(p, e);
        }
    }
    BellSchedule sched;
    sched.cycles = cycles;
    sched.sacrifices = sacrifices;
    for (auto s : {Spectator::Zero, Spectator::Plus}) {
        auto m = compute_bell_model(g, s, sched);
        auto mw = syndrome_weights(s, PauliWeights::unit());
        for (uint32_t syn = 1; syn < 256; syn++) {
            int actual = m.dist[syn].min_degree();
            int expected = noisy ? std::min((int)mw[syn], degree_cap + 1) : -1;
            if (actual != expected) {
                rep.issues.push_back({s, syn, expected, actual, "degree"});
            }
            if (is_undetected_logical(syn) && actual >= 0 && actual < 2) {
                rep.issues.push_back({s, syn, 2, actual, "undetected"});
            }
        }
    }
    rep.pass = rep.issues.empty();
    return rep;
}

inline nlohmann::ordered_json formal_report_to_json(const FormalCheckReport &r) {
    auto issues = nlohmann::ordered_json::array();
    for (const auto &i : r.issues) {
        issues.push_back({{"spectator", spectator_name(i.spectator)},
                          {"syndrome", i.syndrome},
                          {"kind", i.kind},
                          {"expected_degree", i.expected},
                          {"actual_degree", i.actual}});
    }
    return {{"degree_cap", r.degree_cap},
            {"e_max", r.e_max},
            {"cycles", r.cycles},
            {"pass", r.pass},
            {"issues", issues}};
}

}  // namespace postsel

#endif
