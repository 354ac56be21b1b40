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

// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// and runtime limit. Usage: qtmag_acceptance [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtmag/bessel.hpp"
#include "qtmag/cli.hpp"
#include "qtmag/sweep.hpp"

namespace {

using namespace qtmag;

struct Verdict {
    bool pass{false};
    std::string detail;
};

struct Criterion {
    const char* id;
    double limit_s;  // 0: no runtime bound
    std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const double kResonance = std::sqrt(0.19);  // Omega = omega for right circular drive, omega0 = 0.1

BathSpec bath(DensityKind k, double kbt, Vec3 gamma = {1.0, 0.0, 0.0}) {
    BathSpec b;
    b.density = k;
    b.beta_hbar_omega = 1.0 / kbt;
    b.gamma = gamma;
    return b;
}

// Sign flips between consecutive nonzero values.
int sign_changes(const std::vector<double>& v) {
    int n = 0;
    double last = 0.0;
    for (double x : v) {
        if (x == 0.0) continue;
        if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++n;
        last = x;
    }
    return n;
}

// m_quasithermal per bath, in grid order.
std::vector<std::vector<double>> curves(const SweepResult& r) {
    std::vector<std::vector<double>> out(r.plan.baths.size());
    for (const auto& row : r.rows) out[static_cast<std::size_t>(row.bath_index)].push_back(row.m_quasithermal);
    return out;
}

SweepPlan circular_plan(Polarization p, std::vector<double> grid, std::vector<BathSpec> baths) {
    SweepPlan plan;
    plan.drive = {p, 0.0, 0.1};
    plan.f_grid = std::move(grid);
    plan.baths = std::move(baths);
    return plan;
}

const std::vector<DensityKind> kDensities{DensityKind::Constant, DensityKind::Quadratic, DensityKind::Gaussian};

// ---------------------------------------------------------------------------

Verdict circular_collapse() {
    const SpinSystem s = build_spin_system(7);
    auto spread = [&](double f) {
        return quasienergy_spread(solve_circular_analytic(s, {Polarization::RightCircular, f, 0.1}).quasienergies);
    };
    // Smallest spread inside the +-1e-6 window around the collapse.
    double best = 1.0;
    for (int k = -10; k <= 10; ++k) best = std::min(best, spread(kResonance + k * 1e-7));
    const double edge = std::max(spread(kResonance - 1e-6), spread(kResonance + 1e-6));

    // Omega = 3/2 at F = 1.2: two degenerate clusters of four states each.
    const auto eps15 = solve_circular_analytic(s, {Polarization::RightCircular, 1.2, 0.1}).quasienergies;
    const auto clusters15 = qtmag::detail::degenerate_clusters(eps15, 1e-9);
    const bool pattern15 = clusters15.size() == 2 && clusters15[0].size() == 4 && clusters15[1].size() == 4;

    // Omega = 2: search F in 1.786 +- 0.01 for the full collapse.
    double best2 = 1.0;
    double f2 = 0.0;
    for (int k = -100; k <= 100; ++k) {
        const double f = 1.786 + k * 1e-4;
        const double sp = spread(f);
        if (sp < best2) {
            best2 = sp;
            f2 = f;
        }
    }
    const bool pass = best < 1e-6 && pattern15 && best2 < 1e-2 && std::fabs(f2 - 1.786) <= 0.01;
    return {pass, fmt("min spread in sqrt(0.19)+-1e-6 window %.2e (edge %.2e); F=1.2 clusters %zu; "
                      "Omega=2 collapse at F=%.4f (spread %.2e)",
                      best, edge, clusters15.size(), f2, best2)};
}

Verdict linear_collapse() {
    const SpinSystem s = build_spin_system(7);
    auto spread = [&](double f, int n_steps) {
        NumericOptions o;
        o.n_steps = n_steps;
        return quasienergy_spread(solve_numeric(s, {Polarization::Linear, f, 0.1}, o).quasienergies);
    };
    // Coarse scan at a reduced step count, then golden-section refinement at
    // the default resolution.
    std::vector<double> grid;
    std::vector<double> val;
    for (double f = 1.0; f <= 7.0 + 1e-12; f += 0.1) {
        grid.push_back(f);
        val.push_back(spread(f, 1024));
    }
    std::vector<double> minima;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        if (val[k] <= val[k - 1] && val[k] <= val[k + 1] && val[k] < 0.1) {
            double a = grid[k - 1];
            double b = grid[k + 1];
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - g * (b - a);
            double d = a + g * (b - a);
            double fc = spread(c, 4096);
            double fd = spread(d, 4096);
            while (b - a > 1e-3) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = spread(c, 4096);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = spread(d, 4096);
                }
            }
            minima.push_back(0.5 * (a + b));
        }
    }
    const auto z = bessel_j0_collapse_points(2);
    const bool pass = minima.size() >= 2 && std::fabs(minima[0] - z[0]) <= 0.05 && std::fabs(minima[1] - z[1]) <= 0.05;
    std::string found;
    for (double m : minima) found += fmt(" %.4f", m);
    return {pass, fmt("spread minima at F/omega =%s; J0 zeros %.4f, %.4f (tol 0.05)", found.c_str(), z[0], z[1])};
}

Verdict undriven_universality() {
    const SpinSystem s = build_spin_system(7);
    const FloquetSolution fs = solve_circular_analytic(s, {Polarization::RightCircular, 0.0, 0.1});
    const auto szavg = cycle_averaged_sz(fs, s);
    double p_worst = 0.0;
    double m1 = 0.0;
    double m10 = 0.0;
    bool ok = true;
    for (double beta : {1.0, 10.0}) {
        for (DensityKind k : kDensities) {
            const BathOutcome o = evaluate_bath(s, fs, szavg, 0.1, bath(k, 1.0 / beta));
            if (!o.ok) {
                ok = false;
                continue;
            }
            const auto eq = boltzmann_reference(s, 0.1, beta);
            for (int m = 0; m < s.dim; ++m) p_worst = std::max(p_worst, std::fabs(o.p.p[m] - eq.p[m]));
            (beta == 1.0 ? m1 : m10) = o.m_quasithermal;
        }
    }
    const bool pass = ok && p_worst <= 1e-8 && std::fabs(m1 + 0.525) <= 0.005 && std::fabs(m10 + 2.921) <= 0.005;
    return {pass, fmt("|p - p_Boltzmann| max %.2e (tol 1e-8); <m>(beta=1) = %.6f (want -0.525 +- 0.005), "
                      "<m>(beta=10) = %.6f (want -2.921 +- 0.005)",
                      p_worst, m1, m10)};
}

Verdict right_circular_structure() {
    const SpinSystem s = build_spin_system(7);
    std::vector<BathSpec> baths;
    for (DensityKind k : kDensities) baths.push_back(bath(k, 1.0));
    const SweepResult r = run_sweep(circular_plan(Polarization::RightCircular, uniform_grid(0.01, 2.0, 200), baths));
    const auto c = curves(r);
    auto m = [&](DensityKind k, double f) {
        return magnetization_at(s, {Polarization::RightCircular, f, 0.1}, bath(k, 1.0));
    };

    // (a) constant: crosses zero through the resonance, small on both sides.
    const double a_lo = m(DensityKind::Constant, kResonance - 1e-3);
    const double a_hi = m(DensityKind::Constant, kResonance + 1e-3);
    const bool a = (a_lo > 0.0) != (a_hi > 0.0) && std::fabs(a_lo) < 0.02 && std::fabs(a_hi) < 0.02;

    // (b) Gaussian: dip that vanishes at the resonance.
    const double b_lo = m(DensityKind::Gaussian, kResonance - 1e-6);
    const double b_hi = m(DensityKind::Gaussian, kResonance + 1e-6);
    const double b_far =
        std::min(std::fabs(m(DensityKind::Gaussian, kResonance - 0.05)), std::fabs(m(DensityKind::Gaussian, kResonance + 0.05)));
    const bool b = std::max(std::fabs(b_lo), std::fabs(b_hi)) < 1e-3 &&
                   std::max(std::fabs(b_lo), std::fabs(b_hi)) < 0.1 * b_far;

    // (c) quadratic: local maximum at the resonance.
    const double c_at = 0.5 * (m(DensityKind::Quadratic, kResonance - 1e-6) + m(DensityKind::Quadratic, kResonance + 1e-6));
    const double c_lo = m(DensityKind::Quadratic, kResonance - 1e-2);
    const double c_hi = m(DensityKind::Quadratic, kResonance + 1e-2);
    const bool cc = c_at > c_lo && c_at > c_hi;

    // (d) every curve changes sign on (0, 2].
    const int s0 = sign_changes(c[0]);
    const int s1 = sign_changes(c[1]);
    const int s2 = sign_changes(c[2]);
    const bool d = r.all_ok() && s0 >= 1 && s1 >= 1 && s2 >= 1;

    return {a && b && cc && d,
            fmt("(a) constant m(F0-+1e-3) = %.2e / %.2e %s; (b) gaussian |m(F0-+1e-6)| = %.1e / %.1e vs %.3f at +-0.05 %s; "
                "(c) quadratic m(F0) = %.4f vs %.4f / %.4f at -+1e-2 %s; (d) sign changes %d/%d/%d on 200 points %s",
                a_lo, a_hi, a ? "ok" : "FAIL", std::fabs(b_lo), std::fabs(b_hi), b_far, b ? "ok" : "FAIL", c_at, c_lo,
                c_hi, cc ? "ok" : "FAIL", s0, s1, s2, d ? "ok" : "FAIL")};
}

Verdict effective_cooling() {
    const SpinSystem s = build_spin_system(7);
    const double target = 0.8 * std::fabs(mean_m(s, boltzmann_reference(s, 0.1, 10.0)));
    std::vector<double> grid = uniform_grid(0.01, 2.0, 200);
    grid.push_back(kResonance - 1e-6);
    grid.push_back(kResonance + 1e-6);
    std::sort(grid.begin(), grid.end());
    std::vector<BathSpec> baths;
    for (DensityKind k : kDensities) baths.push_back(bath(k, 1.0));
    const SweepResult r = run_sweep(circular_plan(Polarization::RightCircular, grid, baths));
    const auto c = curves(r);
    double best = 0.0;
    const char* who = "";
    for (std::size_t b = 0; b < c.size(); ++b) {
        for (double v : c[b]) {
            if (std::fabs(v) > best) {
                best = std::fabs(v);
                who = to_string(kDensities[b]);
            }
        }
    }
    return {r.all_ok() && best >= target,
            fmt("max |<<m>>| at kT=1 over F <= 2: %.4f (%s density) vs 0.8 |<m>_eq(kT=0.1)| = %.4f", best, who, target)};
}

Verdict linear_collapse_zeros() {
    std::vector<double> grid = uniform_grid(0.02, 8.0, 400);
    const auto zeros = bessel_j0_collapse_points(3);
    for (double z : zeros) {
        if (z <= 8.0) grid.push_back(z);  // moved to z + 1e-6 by the sweep
    }
    std::sort(grid.begin(), grid.end());
    SweepPlan plan;
    plan.drive = {Polarization::Linear, 0.0, 0.1};
    plan.f_grid = grid;
    plan.solver = SolverKind::Numeric;
    for (DensityKind k : kDensities) plan.baths.push_back(bath(k, 1.0, {1.0, 1.0, 1.0}));
    const SweepResult r = run_sweep(plan);
    const auto c = curves(r);
    double at_zero = NAN;
    for (const auto& row : r.rows) {
        if (row.bath_index == 0 && std::fabs(row.f_over_omega - zeros[0]) < 2e-6) at_zero = row.m_quasithermal;
    }
    const int s0 = sign_changes(c[0]);
    const int s1 = sign_changes(c[1]);
    const int s2 = sign_changes(c[2]);
    // Where the constant curve flips, and how far it strays from its dominant sign.
    double pos = 0.0;
    double neg = 0.0;
    std::string flips;
    for (std::size_t i = 0; i < c[0].size(); ++i) {
        pos = std::max(pos, c[0][i]);
        neg = std::max(neg, -c[0][i]);
        if (i > 0 && (c[0][i] > 0.0) != (c[0][i - 1] > 0.0)) flips += fmt(" %.4f", r.plan.f_grid[i]);
    }
    const bool pass = r.all_ok() && std::fabs(at_zero) < 0.02 && s0 == 0 && s1 >= 2 && s2 >= 2;
    return {pass, fmt("%zu points; constant |m| at first J0 zero %.2e (tol 0.02); sign changes constant/quadratic/"
                      "gaussian = %d/%d/%d (want 0, >=2, >=2); constant minority-sign peak %.2e, flips at F/omega:%s",
                      r.plan.f_grid.size(), std::fabs(at_zero), s0, s1, s2, std::min(pos, neg),
                      flips.empty() ? " none" : flips.c_str())};
}

Verdict pt_antisymmetry() {
    const SpinSystem s = build_spin_system(7);
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ff(0.0, 2.0);
    std::uniform_real_distribution<double> kt(0.1, 2.0);
    std::uniform_int_distribution<int> dk(0, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double f = ff(rng);
        const BathSpec b = bath(static_cast<DensityKind>(dk(rng)), kt(rng));
        const double left = magnetization_at(s, {Polarization::LeftCircular, f, 0.1}, b);
        const double right = magnetization_at(s, {Polarization::RightCircular, f, -0.1}, b);
        worst = std::max(worst, std::fabs(left + right));
    }
    return {worst <= 1e-8, fmt("10 random (F, beta, density): max |m_left(+w0) + m_right(-w0)| = %.2e (tol 1e-8)", worst)};
}

Verdict left_circular_enhancement() {
    const SpinSystem s = build_spin_system(7);
    const SweepResult r = run_sweep(
        circular_plan(Polarization::LeftCircular, uniform_grid(0.01, 2.0, 200), {bath(DensityKind::Gaussian, 1.0)}));
    const auto c = curves(r)[0];
    const double eq = std::fabs(mean_m(s, boltzmann_reference(s, 0.1, 1.0)));
    double best = 0.0;
    double at = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (std::fabs(c[k]) > best) {
            best = std::fabs(c[k]);
            at = r.plan.f_grid[k];
        }
    }
    const int flips = sign_changes(c);
    return {r.all_ok() && best / eq > 5.0 && flips == 0,
            fmt("max |<<m>>|/|<m>_eq| = %.3f at F/omega = %.2f (want > 5); sign changes %d (want 0)", best / eq, at, flips)};
}

Verdict oracle_equivalence() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> tj(1, 7);
    std::uniform_real_distribution<double> ff(0.0, 3.0);
    std::uniform_real_distribution<double> w0(-1.0, 1.0);
    std::uniform_real_distribution<double> kt(0.1, 2.0);
    std::bernoulli_distribution left(0.5);
    double eps_worst = 0.0;
    double proj_worst = 0.0;
    double m_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const SpinSystem s = build_spin_system(tj(rng));
        const DriveConfig d{left(rng) ? Polarization::LeftCircular : Polarization::RightCircular, ff(rng), w0(rng)};
        const FloquetSolution a = solve_circular_analytic(s, d);
        const FloquetSolution n = solve_numeric(s, d);
        // Pair states by maximal projector overlap, then compare.
        const BranchAssignment ba = track_branches(a, n);
        for (int m = 0; m < s.dim; ++m) {
            const int k = ba.perm[static_cast<std::size_t>(m)];
            eps_worst = std::max(eps_worst, circular_distance(a.quasienergies[m], n.quasienergies[k]));
            const Eigen::VectorXcd ua = a.u0(m);
            const Eigen::VectorXcd un = n.u0(k);
            proj_worst = std::max(proj_worst, max_abs(ua * ua.adjoint() - un * un.adjoint()));
        }
        const BathSpec b = bath(static_cast<DensityKind>(trial % 3), kt(rng));
        m_worst = std::max(m_worst, std::fabs(magnetization_at(s, d, b, SolverKind::Analytic) -
                                              magnetization_at(s, d, b, SolverKind::Numeric)));
    }
    return {eps_worst <= 1e-7 && proj_worst <= 1e-6 && m_worst <= 1e-6,
            fmt("20 random circular points: quasienergies %.2e (tol 1e-7), projectors %.2e (tol 1e-6), <<m>> %.2e "
                "(tol 1e-6)",
                eps_worst, proj_worst, m_worst)};
}

Verdict property_suites() {
    std::ostringstream out;
    std::ostringstream err;
    const int code = qtmag::cli::run({"qtmag", "verify"}, out, err);
    std::istringstream lines(out.str());
    std::string line;
    std::string summary;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        summary += " " + j.at("check").get<std::string>() + "=" + (j.at("passed").get<bool>() ? "pass" : "FAIL");
    }
    return {code == 0, fmt("verify exit %d:%s", code, summary.c_str())};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"circular-collapse", 1.0, circular_collapse},
        {"linear-collapse", 10.0, linear_collapse},
        {"undriven-universality", 1.0, undriven_universality},
        {"right-circular-structure", 60.0, right_circular_structure},
        {"effective-cooling", 0.0, effective_cooling},
        {"linear-collapse-zeros", 300.0, linear_collapse_zeros},
        {"pt-antisymmetry", 10.0, pt_antisymmetry},
        {"left-circular-enhancement", 60.0, left_circular_enhancement},
        {"oracle-equivalence", 0.0, oracle_equivalence},
        {"property-suites", 0.0, property_suites},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const auto& w : wanted) {
        const auto& all = criteria();
        if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return w == c.id; })) {
            std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
            return 2;
        }
    }
    int failed = 0;
    for (const auto& c : criteria()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
        const bool pass = v.pass && in_time;
        failed += pass ? 0 : 1;
        const std::string limit = c.limit_s > 0.0 ? fmt("limit %.0f s", c.limit_s) : std::string("no limit");
        std::printf("%s %s: %s [%.2f s, %s%s]\n", pass ? "PASS" : "FAIL", c.id, v.detail.c_str(), secs,
                    limit.c_str(), in_time ? "" : ", TOO SLOW");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
