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

// verify.hpp: cross-module property checks run by `qtmag verify`.
//
// Every check is deterministic (fixed seeds) and reports a one-line detail
// with the worst deviation it saw.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qtmag/bath.hpp"
#include "qtmag/floquet.hpp"
#include "qtmag/observables.hpp"
#include "qtmag/spin_algebra.hpp"
#include "qtmag/steady_state.hpp"
#include "qtmag/sweep.hpp"

namespace qtmag::verify {

struct Settings {
    int two_j{7};
    double omega0{0.1};
    int n_t{128};
    int n_steps{4096};
    int l_max{32};
};

struct CheckResult {
    std::string name;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

inline SolverControls controls(const Settings& st) { return {st.n_t, st.n_steps, st.l_max}; }

inline NumericOptions numeric_options(const Settings& st) {
    NumericOptions o;
    o.n_t = st.n_t;
    o.n_steps = st.n_steps;
    return o;
}

// Greedy nearest matching on the circle.
inline double eps_mismatch(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (double e : a) {
        double best = 1.0;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double d = circular_distance(e, b[k]);
            if (!used[k] && d < best) {
                best = d;
                arg = k;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

inline double eps_mismatch(const FloquetSolution& a, const FloquetSolution& b) {
    return eps_mismatch(a.quasienergies, b.quasienergies);
}

}  // namespace detail

inline CheckResult check_spin_algebra(const Settings&) {
    double worst = 0.0;
    for (int tj = 1; tj <= 16; ++tj) {
        const SpinSystem s = build_spin_system(tj);
        const double j = s.j();
        const cplx i(0.0, 1.0);
        worst = std::max({worst, max_abs(s.sx * s.sy - s.sy * s.sx - i * s.sz),
                          max_abs(s.sy * s.sz - s.sz * s.sy - i * s.sx),
                          max_abs(s.sz * s.sx - s.sx * s.sz - i * s.sy),
                          max_abs(s.sx * s.sx + s.sy * s.sy + s.sz * s.sz - j * (j + 1.0) * s.identity()),
                          max_abs(s.sx - s.sx.adjoint()), max_abs(s.sy - s.sy.adjoint()),
                          max_abs(s.sz - s.sz.adjoint()), std::abs(s.sz.trace())});
    }
    return {"spin-algebra", worst <= 1e-12, detail::fmt("max identity violation %.3e over 2J = 1..16", worst)};
}

inline CheckResult check_analytic_numeric(const Settings& st) {
    std::mt19937_64 rng(20200520);
    std::uniform_int_distribution<int> tj(1, 7);
    std::uniform_real_distribution<double> ff(0.0, 3.0);
    std::uniform_real_distribution<double> w0(-0.5, 0.5);
    std::bernoulli_distribution left(0.5);
    double eps_worst = 0.0;
    double proj_worst = 0.0;
    double m_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const SpinSystem s = build_spin_system(tj(rng));
        const DriveConfig d{left(rng) ? Polarization::LeftCircular : Polarization::RightCircular, ff(rng), w0(rng)};
        const FloquetSolution a = solve_circular_analytic(s, d, st.n_t);
        const FloquetSolution n = solve_numeric(s, d, detail::numeric_options(st));
        eps_worst = std::max(eps_worst, detail::eps_mismatch(a, n));
        const BranchAssignment ba = track_branches(a, n);
        for (int m = 0; m < s.dim; ++m) {
            const Eigen::VectorXcd ua = a.u0(m);
            const Eigen::VectorXcd un = n.u0(ba.perm[static_cast<std::size_t>(m)]);
            proj_worst = std::max(proj_worst, max_abs(ua * ua.adjoint() - un * un.adjoint()));
        }
        BathSpec b;
        b.density = static_cast<DensityKind>(trial % 3);
        b.l_max = st.l_max;
        const double ma = magnetization_at(s, d, b, SolverKind::Analytic, detail::controls(st));
        const double mn = magnetization_at(s, d, b, SolverKind::Numeric, detail::controls(st));
        m_worst = std::max(m_worst, std::fabs(ma - mn));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "20 circular points: eps %.3e (tol 1e-7), projector %.3e (tol 1e-6), <<m>> %.3e (tol 1e-6)",
                  eps_worst, proj_worst, m_worst);
    return {"analytic-numeric", eps_worst <= 1e-7 && proj_worst <= 1e-6 && m_worst <= 1e-6, buf};
}

inline CheckResult check_parseval(const Settings& st) {
    const SpinSystem s = build_spin_system(st.two_j);
    double worst = 0.0;
    const int lmax = st.n_t / 2 - 1;
    for (const auto& d : {DriveConfig{Polarization::RightCircular, 0.7, st.omega0},
                          DriveConfig{Polarization::LeftCircular, 1.3, st.omega0},
                          DriveConfig{Polarization::Linear, 4.0, st.omega0}}) {
        const FloquetSolution fs = solve_numeric(s, d, detail::numeric_options(st));
        const Eigen::MatrixXcd v = coupling_operator(s, {1.0, 1.0, 1.0});
        const FourierElements fe = fourier_elements(fs, v, lmax);
        const auto samples = sampled_elements(fs, v);
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(s.dim, s.dim);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(s.dim, s.dim);
        for (const auto& c : fe.coefficients) lhs += c.cwiseAbs2();
        for (const auto& m : samples) rhs += m.cwiseAbs2() / static_cast<double>(fs.n_t);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return {"parseval", worst <= 1e-8, detail::fmt("max |sum_l |V^(l)|^2 - <|V(t)|^2>| = %.3e (tol 1e-8)", worst)};
}

inline CheckResult check_rates(const Settings& st) {
    const SpinSystem s = build_spin_system(st.two_j);
    double most_negative = 0.0;
    int evaluated = 0;
    for (double f : {0.0, 0.3, 0.8, 1.5}) {
        for (Polarization p : {Polarization::RightCircular, Polarization::LeftCircular}) {
            const FloquetSolution fs = solve_circular_analytic(s, {p, f, st.omega0}, st.n_t);
            for (DensityKind k : {DensityKind::Constant, DensityKind::Quadratic, DensityKind::Gaussian}) {
                for (double beta : {1.0, 10.0}) {
                    BathSpec b;
                    b.density = k;
                    b.beta_hbar_omega = beta;
                    b.gamma = {1.0, 0.5, 0.25};
                    b.l_max = st.l_max;
                    const RateMatrix r = rate_matrix(fourier_elements(fs, coupling_operator(s, b.gamma), b.l_max), b);
                    most_negative = std::min(most_negative, r.gamma_total.minCoeff());
                    ++evaluated;
                }
            }
        }
    }
    return {"rates", most_negative >= 0.0,
            detail::fmt("%.0f rate matrices, most negative entry %.3e", evaluated, most_negative)};
}

inline CheckResult check_detailed_balance(const Settings& st) {
    const SpinSystem s = build_spin_system(st.two_j);
    const FloquetSolution fs = solve_circular_analytic(s, {Polarization::RightCircular, 0.0, st.omega0}, st.n_t);
    double ratio_worst = 0.0;
    double p_worst = 0.0;
    for (DensityKind k : {DensityKind::Constant, DensityKind::Quadratic, DensityKind::Gaussian}) {
        for (double beta : {1.0, 10.0}) {
            BathSpec b;
            b.density = k;
            b.beta_hbar_omega = beta;
            b.l_max = st.l_max;
            const RateMatrix r = rate_matrix(fourier_elements(fs, coupling_operator(s, b.gamma), b.l_max), b);
            for (int f = 0; f < s.dim; ++f) {
                for (int i = 0; i < s.dim; ++i) {
                    if (f == i || r.gamma_total(f, i) == 0.0 || r.gamma_total(i, f) == 0.0) continue;
                    const double expect = std::exp(-beta * st.omega0 * (s.m_of(f) - s.m_of(i)));
                    ratio_worst = std::max(ratio_worst,
                                           std::fabs(r.gamma_total(f, i) / r.gamma_total(i, f) / expect - 1.0));
                }
            }
            const auto p = solve_steady_state(r);
            const auto eq = boltzmann_reference(s, st.omega0, beta);
            for (int m = 0; m < s.dim; ++m) {
                p_worst = std::max(p_worst, std::fabs(p.p[static_cast<std::size_t>(m)] - eq.p[static_cast<std::size_t>(m)]));
            }
        }
    }
    return {"detailed-balance", ratio_worst <= 1e-8 && p_worst <= 1e-8,
            detail::fmt("F = 0: rate-ratio deviation %.3e, |p - p_eq| %.3e (tol 1e-8)", ratio_worst, p_worst)};
}

inline CheckResult check_steady_state(const Settings&) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dims(2, 12);
    std::uniform_real_distribution<double> mag(-6.0, 3.0);
    double norm_worst = 0.0;
    double neg_worst = 0.0;
    double res_worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = dims(rng);
        RateMatrix r;
        r.dim = n;
        r.gamma_total = Eigen::MatrixXd::Zero(n, n);
        for (int f = 0; f < n; ++f) {
            for (int i = 0; i < n; ++i) {
                if (f != i) r.gamma_total(f, i) = std::pow(10.0, mag(rng));
            }
        }
        const auto p = solve_steady_state(r);
        double total = 0.0;
        for (double v : p.p) {
            total += v;
            neg_worst = std::min(neg_worst, v);
        }
        norm_worst = std::max(norm_worst, std::fabs(total - 1.0));
        res_worst = std::max(res_worst, p.residual / r.gamma_total.maxCoeff());
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "500 random generators: |sum p - 1| %.3e, min p %.3e, residual/max rate %.3e",
                  norm_worst, neg_worst, res_worst);
    return {"steady-state", norm_worst <= 1e-12 && neg_worst >= 0.0 && res_worst <= 1e-10, buf};
}

inline CheckResult check_pt_symmetry(const Settings& st) {
    const SpinSystem s = build_spin_system(st.two_j);
    double eps_worst = 0.0;
    double m_worst = 0.0;
    std::mt19937_64 rng(1927);
    std::uniform_real_distribution<double> ff(0.05, 2.0);
    std::uniform_real_distribution<double> kt(0.1, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double f = ff(rng);
        const DriveConfig left{Polarization::LeftCircular, f, st.omega0};
        const DriveConfig right{Polarization::RightCircular, f, -st.omega0};
        eps_worst = std::max(eps_worst, detail::eps_mismatch(solve_circular_analytic(s, left, st.n_t),
                                                             solve_circular_analytic(s, right, st.n_t)));
        if (trial < 3) {
            eps_worst = std::max(eps_worst, detail::eps_mismatch(solve_numeric(s, left, detail::numeric_options(st)),
                                                                 solve_numeric(s, right, detail::numeric_options(st))));
        }
        BathSpec b;
        b.density = static_cast<DensityKind>(trial % 3);
        b.beta_hbar_omega = 1.0 / kt(rng);
        b.l_max = st.l_max;
        m_worst = std::max(m_worst, std::fabs(magnetization_at(s, left, b, SolverKind::Analytic, detail::controls(st)) +
                                              magnetization_at(s, right, b, SolverKind::Analytic, detail::controls(st))));
    }
    return {"pt-symmetry", eps_worst <= 1e-9 && m_worst <= 1e-8,
            detail::fmt("left(+w0) vs right(-w0): spectra %.3e (tol 1e-9), <<m>> sum %.3e (tol 1e-8)", eps_worst, m_worst)};
}

// Propagates with the configured n_steps directly, so an under-resolved
// integrator shows up as a quasienergy shift on doubling.
inline CheckResult check_unitarity(const Settings& st) {
    if (st.n_steps < 1) return {"unitarity", false, "n_steps must be positive"};
    const SpinSystem s = build_spin_system(st.two_j);
    auto phases = [&](const Eigen::MatrixXcd& u) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
        std::vector<double> e;
        for (int k = 0; k < u.rows(); ++k) e.push_back(qtmag::detail::eigenphase_quasienergy(es.eigenvalues()(k)));
        return e;
    };
    double unit_worst = 0.0;
    double moved_worst = 0.0;
    for (const auto& d : {DriveConfig{Polarization::RightCircular, 1.0, st.omega0},
                          DriveConfig{Polarization::Linear, 3.0, st.omega0}}) {
        const Eigen::MatrixXcd u = propagate(s, d, 1, st.n_steps).period;
        unit_worst = std::max(unit_worst, max_abs(u.adjoint() * u - s.identity()));
        moved_worst = std::max(moved_worst,
                               detail::eps_mismatch(phases(u), phases(propagate(s, d, 1, 2 * st.n_steps).period)));
    }
    const bool grid_ok = st.n_steps >= 100 && st.n_t > 0 && st.n_steps % st.n_t == 0;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "n_steps=%d%s: |U^dag U - 1| %.3e (tol 1e-8), quasienergy shift on doubling %.3e (tol 1e-9)",
                  st.n_steps, grid_ok ? "" : " (below 100 or not a multiple of n_t)", unit_worst, moved_worst);
    return {"unitarity", grid_ok && unit_worst <= 1e-8 && moved_worst <= 1e-9, buf};
}

struct NamedCheck {
    const char* name;
    std::function<CheckResult(const Settings&)> run;
};

inline const std::vector<NamedCheck>& all_checks() {
    static const std::vector<NamedCheck> checks{
        {"spin-algebra", check_spin_algebra},   {"unitarity", check_unitarity},
        {"analytic-numeric", check_analytic_numeric}, {"parseval", check_parseval},
        {"rates", check_rates},                 {"detailed-balance", check_detailed_balance},
        {"steady-state", check_steady_state},   {"pt-symmetry", check_pt_symmetry},
    };
    return checks;
}

// Runs one check, turning exceptions into failures.
inline CheckResult run_check(const NamedCheck& c, const Settings& st) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = c.run(st);
    } catch (const std::exception& e) {
        r = {c.name, false, std::string("error: ") + e.what()};
    }
    r.name = c.name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace qtmag::verify
