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

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "postsel/run.hpp"

using namespace postsel;

namespace {

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("Failed to open '" + path + "' for writing.");
    }
    out << content;
}

struct Options {
    double p_prep = 0.01;
    double p_cnot = 0.03;
    std::optional<double> p_meas;
    std::optional<double> p_hadamard;
    std::optional<double> p_special;
    std::optional<int> levels;
    std::optional<std::string> schedule;
    std::string backend = "double";
    unsigned digits = 48;
    int cycles = 2;
    std::string sacrifices = sacrifice_policy_name(SacrificePolicy::Tree);
    std::string ties = tie_policy_name(TiePolicy::Proportional);
    double failure_cutoff = 0.25;
    double memory_error = 0.004;
    double code_tolerance = 0.11;
    std::string json_out;
    std::string csv_out;
    std::vector<double> grid_cnot = GridConfig::default_axis();
    std::vector<double> grid_prep = GridConfig::default_axis();
    std::vector<double> extra_cnot = GridConfig{}.extra_cnot;
    unsigned threads = 0;
    int degree_cap = 4;
    double e_max = 1e-4;
    bool noiseless = false;

    std::vector<Spectator> resolve_schedule(const char *fallback) const {
        auto s = parse_schedule(schedule.value_or(fallback));
        if (levels) {
            if (schedule && (int)s.size() != *levels) {
                throw std::invalid_argument("--levels does not match the length of --schedule.");
            }
            if (*levels < 1) {
                throw std::invalid_argument("--levels must be at least 1.");
            }
            s.resize(*levels, Spectator::Zero);
        }
        return s;
    }

    BellSchedule bell() const {
        BellSchedule b;
        b.cycles = cycles;
        b.sacrifices = parse_sacrifice_policy(sacrifices);
        return b;
    }

    RunConfig run_config() const {
        RunConfig c;
        c.phys = PhysicalErrorParams::from_prep_cnot(p_prep, p_cnot);
        if (p_meas) {
            c.phys.p_meas = *p_meas;
        }
        if (p_hadamard) {
            c.phys.p_hadamard = *p_hadamard;
        }
        if (p_special) {
            c.phys.p_special = *p_special;
        }
        c.schedule = resolve_schedule("+000+");
        if (backend == "double") {
            c.backend = Backend::Double;
        } else if (backend == "bigfloat") {
            c.backend = Backend::BigFloat;
        } else if (backend == "polynomial") {
            c.backend = Backend::Polynomial;
        } else {
            throw std::invalid_argument("Unknown backend '" + backend + "'.");
        }
        c.digits = digits;
        c.bell = bell();
        c.ties = parse_tie_policy(ties);
        c.failure_cutoff = failure_cutoff;
        c.memory_error = memory_error;
        c.code_tolerance = code_tolerance;
        return c;
    }

    GridConfig grid_config() const {
        GridConfig g;
        g.p_cnot = grid_cnot;
        g.p_prep = grid_prep;
        g.extra_cnot = extra_cnot;
        g.schedule = resolve_schedule("+000");
        g.failure_cutoff = failure_cutoff;
        g.bell = bell();
        g.ties = parse_tie_policy(ties);
        g.threads = threads;
        return g;
    }
};

int run_point_command(const Options &o) {
    auto out = run_point_report(o.run_config());
    std::cout << out.table;
    if (!o.json_out.empty()) {
        write_file(o.json_out, out.document.dump(2) + "\n");
    }
    return 0;
}

int run_grid_command(const Options &o) {
    auto csv = grid_csv(run_grid(o.grid_config()));
    if (o.csv_out.empty()) {
        std::cout << csv;
    } else {
        write_file(o.csv_out, csv);
    }
    return 0;
}

int run_formal_command(const Options &o) {
    auto r = run_formal_check(o.degree_cap, o.e_max, o.cycles, parse_sacrifice_policy(o.sacrifices), !o.noiseless);
    std::cout << "formal-check cycles=" << r.cycles << " degree_cap=" << r.degree_cap << ": "
              << (r.pass ? "pass" : "FAIL") << "\n";
    for (const auto &i : r.issues) {
        std::cout << "  " << spectator_name(i.spectator) << " syndrome " << i.syndrome << " " << i.kind
                  << " expected " << i.expected << " got " << i.actual << "\n";
    }
    if (!o.json_out.empty()) {
        write_file(o.json_out, formal_report_to_json(r).dump(2) + "\n");
    }
    return r.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Error-likelihood threshold analysis for postselected concatenated codes."};
    app.set_config("--config", "", "Flat key=value file keyed by long flag names; command-line flags override it.");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1);
    Options o;

    app.add_option("--p-prep", o.p_prep, "Preparation and measurement error probability.")
        ->capture_default_str();
    app.add_option("--p-cnot", o.p_cnot, "Physical cnot error probability.")->capture_default_str();
    app.add_option("--p-meas", o.p_meas, "Override measurement error probability.");
    app.add_option("--p-hadamard", o.p_hadamard, "Override Hadamard error probability (default 1.5 p_prep).");
    app.add_option("--p-special", o.p_special, "Override special-state preparation error probability.");
    app.add_option("--levels", o.levels, "Number of concatenation levels.");
    app.add_option("--schedule", o.schedule, "Spectator per level, e.g. +000+ or plus,zero.");
    app.add_option("--backend", o.backend, "double or bigfloat.")->capture_default_str();
    app.add_option("--digits", o.digits, "Decimal digits for the bigfloat backend.")->capture_default_str();
    app.add_option("--cycles", o.cycles, "Purification cycles.")->capture_default_str();
    app.add_option("--sacrifices", o.sacrifices, "Sacrificial pair policy: raw, cross-order, tree.")
        ->capture_default_str();
    app.add_option("--ties", o.ties, "Attribution tie policy: proportional, split, first-pair.")
        ->capture_default_str();
    app.add_option("--failure-cutoff", o.failure_cutoff, "Grid saturation probability.")->capture_default_str();
    app.add_option("--memory-error", o.memory_error, "Memory error per step for the budget check.")
        ->capture_default_str();
    app.add_option("--code-tolerance", o.code_tolerance, "Outer code tolerance for the budget check.")
        ->capture_default_str();
    app.add_option("--json", o.json_out, "Write the structured report to this path.");
    app.add_option("--csv", o.csv_out, "Write the grid CSV to this path instead of stdout.");
    app.add_option("--grid-cnot", o.grid_cnot, "Grid cnot probabilities.")->delimiter(',');
    app.add_option("--grid-prep", o.grid_prep, "Grid preparation probabilities.")->delimiter(',');
    app.add_option("--extra-cnot", o.extra_cnot, "Extra cnot probabilities evaluated on every grid row.")
        ->delimiter(',');
    app.add_option("--threads", o.threads, "Grid worker threads; 0 uses all cores.")->capture_default_str();
    app.add_option("--degree-cap", o.degree_cap, "Polynomial truncation degree.")->capture_default_str();
    app.add_option("--e-max", o.e_max, "Polynomial tail bound parameter.")->capture_default_str();
    app.add_flag("--noiseless", o.noiseless, "Formal check with every error location switched off.");

    auto *point = app.add_subcommand("point", "Multi-level report for one parameter point.");
    auto *grid = app.add_subcommand("grid", "Saturation sweep over a grid of parameter points.");
    auto *formal = app.add_subcommand("formal-check", "Degree check of the Bell preparation.");

    CLI11_PARSE(app, argc, argv);
    try {
        if (point->parsed()) {
            return run_point_command(o);
        }
        if (grid->parsed()) {
            return run_grid_command(o);
        }
        if (formal->parsed()) {
            return run_formal_command(o);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
