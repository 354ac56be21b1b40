// Copyright 2026 The qtmag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cli.hpp: command-line front end with the option table, config files, and the
// spectrum / magnetization / verify subcommands.
//
// Config files are flat `key = value` lines with `#` comments. Their keys are
// the long option names without the leading dashes. Config values are
// applied first, so anything also given on the command line wins.

#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qtmag/errors.hpp"
#include "qtmag/sweep.hpp"
#include "qtmag/verify.hpp"

namespace qtmag::cli {

struct RunConfig {
    std::string polarization{"right"};
    int two_j{7};
    double omega0{0.1};
    double f_min{0.0};
    double f_max{2.0};
    int f_steps{201};
    std::string density{"constant,quadratic,gaussian"};
    double omega_c{5.0};
    std::string kbt{"1.0"};
    std::string gamma{"1,0,0"};
    int l_max{32};
    int n_t{128};
    int n_steps{4096};
    double freq_tolerance{1e-9};
    std::string solver{"auto"};
    std::string out{"-"};
    int threads{0};
    std::string config;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline double parse_real(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument(key + ": not a number: '" + s + "'");
    return v;
}

inline std::vector<double> parse_reals(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(parse_real(item, key));
    if (out.empty()) throw InvalidArgument(key + ": empty list");
    return out;
}

inline Polarization parse_polarization(const std::string& s) {
    if (s == "right") return Polarization::RightCircular;
    if (s == "left") return Polarization::LeftCircular;
    if (s == "linear") return Polarization::Linear;
    throw InvalidArgument("polarization: expected right, left or linear, got '" + s + "'");
}

inline DensityKind parse_density(const std::string& s) {
    for (DensityKind k : {DensityKind::Constant, DensityKind::Quadratic, DensityKind::Gaussian}) {
        if (s == to_string(k)) return k;
    }
    throw InvalidArgument("density: expected constant, quadratic or gaussian, got '" + s + "'");
}

inline SolverKind parse_solver(const std::string& s, Polarization p) {
    if (s == "auto") return p == Polarization::Linear ? SolverKind::Numeric : SolverKind::Analytic;
    for (SolverKind k : {SolverKind::Analytic, SolverKind::Numeric, SolverKind::AnalyticWithNumericCheck}) {
        if (s == to_string(k)) return k;
    }
    throw InvalidArgument("solver: expected auto, analytic, numeric or analytic-checked, got '" + s + "'");
}

// Parses a config file body into (key, value) pairs in file order.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in,
                                                                          const std::string& source = "config") {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw InvalidArgument(where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw InvalidArgument(where + ": empty key or value");
        if (!seen.insert(key).second) throw InvalidArgument(where + ": duplicate key '" + key + "'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

// Every key accepted by the sweep subcommands, in help order.
inline void add_run_options(CLI::App& app, RunConfig& c) {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--polarization", c.polarization, "Drive polarization: right, left or linear")
        ->check(CLI::IsMember({"right", "left", "linear"}))
        ->capture_default_str();
    app.add_option("--two-j", c.two_j, "Twice the spin quantum number, 2J >= 1")->capture_default_str();
    app.add_option("--omega0", c.omega0, "Zeeman frequency omega0/omega")->capture_default_str();
    app.add_option("--f-min", c.f_min, "First drive amplitude F/omega")->capture_default_str();
    app.add_option("--f-max", c.f_max, "Last drive amplitude F/omega")->capture_default_str();
    app.add_option("--f-steps", c.f_steps, "Number of grid points")->capture_default_str();
    app.add_option("--density", c.density, "Comma list of bath densities: constant, quadratic, gaussian")
        ->capture_default_str();
    app.add_option("--omega-c", c.omega_c, "Gaussian density centre omega_c/omega")->capture_default_str();
    app.add_option("--kbt", c.kbt, "Comma list of bath temperatures k_B T/(hbar omega)")->capture_default_str();
    app.add_option("--gamma", c.gamma, "Coupling vector gamma_x,gamma_y,gamma_z")->capture_default_str();
    app.add_option("--l-max", c.l_max, "Largest Fourier index kept in the rates")->capture_default_str();
    app.add_option("--n-t", c.n_t, "Time samples per period")->capture_default_str();
    app.add_option("--n-steps", c.n_steps, "Integrator steps per period (numeric solver)")->capture_default_str();
    app.add_option("--freq-tolerance", c.freq_tolerance, "Transition frequencies below this are skipped")
        ->capture_default_str();
    app.add_option("--solver", c.solver, "Floquet solver: auto, analytic, numeric or analytic-checked")
        ->check(CLI::IsMember({"auto", "analytic", "numeric", "analytic-checked"}))
        ->capture_default_str();
    app.add_option("--out", c.out, "Output path, '-' for stdout")->capture_default_str();
    app.add_option("--threads", c.threads, "Worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--config", c.config, "Config file of key = value lines");
}

inline SweepPlan build_plan(const RunConfig& c, SweepOutputs outputs) {
    SweepPlan plan;
    plan.drive.polarization = parse_polarization(c.polarization);
    plan.drive.omega0_over_omega = c.omega0;
    plan.two_j = c.two_j;
    plan.solver = parse_solver(c.solver, plan.drive.polarization);
    plan.controls = {c.n_t, c.n_steps, c.l_max};
    plan.outputs = outputs;
    plan.threads = c.threads;
    if (c.f_steps < 1) throw InvalidArgument("f-steps must be >= 1");
    if (c.f_max < c.f_min) throw InvalidArgument("f-max must be >= f-min");
    plan.f_grid = uniform_grid(c.f_min, c.f_max, c.f_steps);

    const auto g = parse_reals(c.gamma, "gamma");
    if (g.size() != 3) throw InvalidArgument("gamma: expected three comma-separated values");
    std::vector<DensityKind> densities;
    for (const auto& d : split_list(c.density)) densities.push_back(parse_density(d));
    if (densities.empty()) throw InvalidArgument("density: empty list");
    if (outputs.needs_bath()) {
        for (double kbt : parse_reals(c.kbt, "kbt")) {
            if (!(kbt > 0.0)) throw InvalidArgument("kbt must be > 0");
            for (DensityKind k : densities) {
                BathSpec b;
                b.density = k;
                b.omega_c_over_omega = c.omega_c;
                b.beta_hbar_omega = 1.0 / kbt;
                b.gamma = {g[0], g[1], g[2]};
                b.l_max = c.l_max;
                b.freq_tolerance = c.freq_tolerance;
                plan.baths.push_back(b);
            }
        }
    }
    return plan;
}

inline verify::Settings build_settings(const RunConfig& c) {
    return {c.two_j, c.omega0, c.n_t, c.n_steps, c.l_max};
}

// Keys echoed next to the resolved plan.
inline ConfigEcho extra_echo(const RunConfig& c, const std::string& command) {
    return {{"command", command},
            {"f-min", format_real(c.f_min)},
            {"f-max", format_real(c.f_max)},
            {"f-steps", std::to_string(c.f_steps)},
            {"threads", std::to_string(c.threads)},
            {"config", c.config.empty() ? "none" : c.config}};
}

namespace detail {

// Returns args with the config file's entries spliced in right after the
// subcommand name, ahead of the user's own options.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
    std::size_t sub_pos = args.size();
    const CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size() && sub == nullptr; ++i) {
        for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
            if (args[i] == s->get_name()) {
                sub_pos = i;
                sub = s;
                break;
            }
        }
    }
    if (sub == nullptr) return args;
    std::string path;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    std::vector<std::string> injected;
    for (const auto& [key, value] : parse_config_text(in, path)) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config" || key == "help") {
            throw InvalidArgument(path + ": unknown key '" + key + "' for " + sub->get_name());
        }
        injected.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1));
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1), args.end());
    return out;
}

inline std::string elapsed(std::chrono::steady_clock::time_point t0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s",
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return buf;
}

}  // namespace detail

// Runs one sweep subcommand and writes the CSV. Returns 0 iff every row succeeded.
inline int cmd_sweep(const RunConfig& c, const std::string& command, SweepOutputs outputs, std::ostream& stdout_,
                     std::ostream& stderr_) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostream& log = c.out == "-" ? stderr_ : stdout_;
    const SweepResult r = run_sweep(build_plan(c, outputs));
    if (c.out == "-") {
        write_csv(stdout_, r, extra_echo(c, command));
    } else {
        std::ofstream f(c.out);
        if (!f) throw InvalidArgument("cannot open output file '" + c.out + "'");
        write_csv(f, r, extra_echo(c, command));
        if (!f) throw Error("write failed for '" + c.out + "'");
    }
    const auto failed = std::count_if(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return !row.ok; });
    for (const auto& n : r.notices) log << "qtmag " << command << ": notice: " << n << '\n';
    log << "qtmag " << command << ": " << r.plan.f_grid.size() << " points, " << r.rows.size() << " rows, "
        << failed << " failed, wrote " << (c.out == "-" ? "stdout" : c.out) << " in " << detail::elapsed(t0) << '\n';
    return failed == 0 ? 0 : 1;
}

// Runs the property checks named in `checks` (all when empty), one JSON
// object per line. Returns 0 iff every selected check passed.
inline int cmd_verify(const RunConfig& c, const std::string& checks, std::ostream& stdout_, std::ostream& stderr_) {
    std::ostream& log = c.out == "-" ? stderr_ : stdout_;
    std::set<std::string> wanted;
    if (!checks.empty()) {
        for (const auto& name : split_list(checks)) {
            const auto& all = verify::all_checks();
            if (std::none_of(all.begin(), all.end(), [&](const auto& nc) { return name == nc.name; })) {
                throw InvalidArgument("unknown check '" + name + "'");
            }
            wanted.insert(name);
        }
    }
    std::ofstream file;
    if (c.out != "-") {
        file.open(c.out);
        if (!file) throw InvalidArgument("cannot open output file '" + c.out + "'");
    }
    std::ostream& report = c.out == "-" ? stdout_ : file;
    const verify::Settings st = build_settings(c);
    int failed = 0;
    int ran = 0;
    for (const auto& nc : verify::all_checks()) {
        if (!wanted.empty() && !wanted.count(nc.name)) continue;
        const verify::CheckResult r = verify::run_check(nc, st);
        ++ran;
        failed += r.passed ? 0 : 1;
        nlohmann::json j{{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}};
        report << j.dump() << '\n';
    }
    log << "qtmag verify: " << ran - failed << "/" << ran << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

// Entry point shared by the executable and the tests. Exit codes: 0 success,
// 1 failed rows or checks, 2 bad arguments or configuration.
inline int run(const std::vector<std::string>& argv, std::ostream& stdout_ = std::cout,
               std::ostream& stderr_ = std::cerr) {
    CLI::App app{"qtmag: Floquet steady states and quasithermal magnetization of a driven spin", "qtmag"};
    app.require_subcommand(1);
    // Top-level help expands every subcommand, so all keys and defaults show.
    app.set_help_flag();
    app.set_help_all_flag("-h,--help", "Print help for every subcommand and exit");
    RunConfig cfg;
    std::string checks;
    auto* spectrum = app.add_subcommand("spectrum", "Quasienergy spectrum along the F/omega grid");
    auto* magnetization =
        app.add_subcommand("magnetization", "Steady-state occupations and quasithermal magnetization along the grid");
    auto* verify = app.add_subcommand("verify", "Run the built-in property checks");
    for (CLI::App* sub : {spectrum, magnetization, verify}) {
        sub->set_help_all_flag();
        sub->set_help_flag("-h,--help", "Print this help message and exit");
        add_run_options(*sub, cfg);
    }
    verify->add_option("--check", checks,
                       "Comma list of checks to run (default all): spin-algebra, unitarity, analytic-numeric, "
                       "parseval, rates, detailed-balance, steady-state, pt-symmetry");

    try {
        std::vector<std::string> args = detail::expand_config(argv, app);
        std::vector<const char*> cargs;
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, stdout_, stderr_);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        stderr_ << "qtmag: " << e.what() << '\n';
        return 2;
    }

    try {
        if (spectrum->parsed()) return cmd_sweep(cfg, "spectrum", {true, false, false}, stdout_, stderr_);
        if (magnetization->parsed()) return cmd_sweep(cfg, "magnetization", {true, true, true}, stdout_, stderr_);
        return cmd_verify(cfg, checks, stdout_, stderr_);
    } catch (const std::exception& e) {
        stderr_ << "qtmag: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace qtmag::cli
