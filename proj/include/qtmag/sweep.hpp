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

// sweep.hpp: driving-amplitude sweeps: Floquet solve -> rates -> steady
// state -> observables at every grid point, branch tracking across the grid,
// and the CSV output format.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qtmag/bath.hpp"
#include "qtmag/bessel.hpp"
#include "qtmag/errors.hpp"
#include "qtmag/floquet.hpp"
#include "qtmag/observables.hpp"
#include "qtmag/spin_algebra.hpp"
#include "qtmag/steady_state.hpp"

namespace qtmag {

enum class SolverKind { Analytic, Numeric, AnalyticWithNumericCheck };

inline const char* to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Analytic: return "analytic";
        case SolverKind::Numeric: return "numeric";
        case SolverKind::AnalyticWithNumericCheck: return "analytic-checked";
    }
    return "?";
}

struct SolverControls {
    int n_t{128};
    int n_steps{4096};
    int l_max{32};
};

inline FloquetSolution solve_floquet(const SpinSystem& s, const DriveConfig& d, SolverKind kind,
                                     const SolverControls& c) {
    if (kind == SolverKind::Numeric) {
        NumericOptions opt;
        opt.n_t = c.n_t;
        opt.n_steps = c.n_steps;
        return solve_numeric(s, d, opt);
    }
    FloquetSolution fs = solve_circular_analytic(s, d, c.n_t);
    if (kind == SolverKind::AnalyticWithNumericCheck) {
        NumericOptions opt;
        opt.n_t = c.n_t;
        opt.n_steps = c.n_steps;
        const FloquetSolution num = solve_numeric(s, d, opt);
        std::vector<bool> used(num.quasienergies.size(), false);
        for (double e : fs.quasienergies) {
            double best = 1.0;
            std::size_t arg = 0;
            for (std::size_t k = 0; k < num.quasienergies.size(); ++k) {
                const double dist = circular_distance(e, num.quasienergies[k]);
                if (!used[k] && dist < best) {
                    best = dist;
                    arg = k;
                }
            }
            used[arg] = true;
            if (best > 1e-7) {
                throw Error("analytic/numeric quasienergy mismatch " + std::to_string(best));
            }
        }
    }
    return fs;
}

// ------------------------------ Point pipeline ------------------------------

struct BathOutcome {
    bool ok{false};
    std::string error;
    OccupationDistribution p;
    double m_quasithermal{std::numeric_limits<double>::quiet_NaN()};
    double m_equilibrium{std::numeric_limits<double>::quiet_NaN()};
    RateDiagnostics diagnostics;
};

// Rates, steady state and magnetization for one bath on a solved point.
inline BathOutcome evaluate_bath(const SpinSystem& s, const FloquetSolution& fs, const std::vector<double>& szavg,
                                 double omega0, const BathSpec& b) {
    BathOutcome out;
    out.m_equilibrium = mean_m(s, boltzmann_reference(s, omega0, b.beta_hbar_omega));
    try {
        const FourierElements fe = fourier_elements(fs, coupling_operator(s, b.gamma), b.l_max);
        const RateMatrix r = rate_matrix(fe, b);
        out.diagnostics = r.diagnostics;
        out.p = solve_steady_state(r);
        out.m_quasithermal = quasithermal_magnetization(szavg, out.p);
        out.ok = true;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

// Full pipeline at one parameter point; throws on failure.
inline double magnetization_at(const SpinSystem& s, const DriveConfig& d, const BathSpec& b,
                               SolverKind kind = SolverKind::Analytic, const SolverControls& c = {}) {
    const FloquetSolution fs = solve_floquet(s, d, kind, c);
    const BathOutcome o = evaluate_bath(s, fs, cycle_averaged_sz(fs, s), d.omega0_over_omega, b);
    if (!o.ok) throw Error(o.error);
    return o.m_quasithermal;
}

// ------------------------------ Branch tracking -----------------------------

struct BranchAssignment {
    std::vector<int> perm;  // label j of prev continues as state perm[j] of next
    double min_overlap{0.0};
    bool fallback{false};   // quasienergy-order labeling was used
};

inline BranchAssignment track_branches(const Eigen::MatrixXcd& prev_u0, const std::vector<double>& prev_eps,
                                       const Eigen::MatrixXcd& next_u0, const std::vector<double>& next_eps) {
    const int n = static_cast<int>(prev_u0.cols());
    if (next_u0.cols() != n || prev_u0.rows() != next_u0.rows()) {
        throw InvalidArgument("track_branches: dimension mismatch");
    }
    const Eigen::MatrixXd ov = (prev_u0.adjoint() * next_u0).cwiseAbs2();

    auto quality = [&](const std::vector<int>& perm) {
        double lo = 1.0;
        for (int j = 0; j < n; ++j) lo = std::min(lo, ov(j, perm[static_cast<std::size_t>(j)]));
        return lo;
    };

    // Greedy: take the largest remaining overlap first.
    BranchAssignment out;
    out.perm.assign(static_cast<std::size_t>(n), -1);
    std::vector<bool> row_used(static_cast<std::size_t>(n), false);
    std::vector<bool> col_used(static_cast<std::size_t>(n), false);
    for (int step = 0; step < n; ++step) {
        double best = -1.0;
        int bj = 0;
        int bk = 0;
        for (int j = 0; j < n; ++j) {
            if (row_used[static_cast<std::size_t>(j)]) continue;
            for (int k = 0; k < n; ++k) {
                if (!col_used[static_cast<std::size_t>(k)] && ov(j, k) > best) {
                    best = ov(j, k);
                    bj = j;
                    bk = k;
                }
            }
        }
        out.perm[static_cast<std::size_t>(bj)] = bk;
        row_used[static_cast<std::size_t>(bj)] = true;
        col_used[static_cast<std::size_t>(bk)] = true;
    }
    out.min_overlap = quality(out.perm);

    if (out.min_overlap < 0.5 && n <= 8) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
        double best_sum = -1.0;
        do {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) sum += ov(j, perm[static_cast<std::size_t>(j)]);
            if (sum > best_sum + 1e-14) {
                best_sum = sum;
                out.perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.min_overlap = quality(out.perm);
    }

    if (out.min_overlap < 0.5) {
        // Ambiguous: match quasienergy ranks instead.
        auto ranks = [n](const std::vector<double>& e) {
            std::vector<int> idx(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) idx[static_cast<std::size_t>(k)] = k;
            std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
                return e[static_cast<std::size_t>(a)] < e[static_cast<std::size_t>(b)];
            });
            return idx;
        };
        const auto pr = ranks(prev_eps);
        const auto nr = ranks(next_eps);
        for (int r = 0; r < n; ++r) out.perm[static_cast<std::size_t>(pr[static_cast<std::size_t>(r)])] = nr[static_cast<std::size_t>(r)];
        out.min_overlap = quality(out.perm);
        out.fallback = true;
    }
    return out;
}

inline BranchAssignment track_branches(const FloquetSolution& prev, const FloquetSolution& next) {
    if (prev.dim != next.dim) {
        throw InvalidArgument("track_branches: solutions have different dimensions");
    }
    return track_branches(prev.floquet_functions.front(), prev.quasienergies, next.floquet_functions.front(),
                          next.quasienergies);
}

// ------------------------------- Sweep plan ---------------------------------

struct SweepOutputs {
    bool spectrum{true};
    bool occupations{true};
    bool magnetization{true};
    bool needs_bath() const { return occupations || magnetization; }
};

struct SweepPlan {
    DriveConfig drive;  // f_over_omega is taken from f_grid
    std::vector<double> f_grid;
    std::vector<BathSpec> baths;
    int two_j{7};
    SolverKind solver{SolverKind::Analytic};
    SolverControls controls;
    SweepOutputs outputs;
    int threads{0};  // 0: hardware concurrency
};

inline std::vector<double> uniform_grid(double f_min, double f_max, int steps) {
    if (steps < 1) throw InvalidArgument("uniform_grid: need at least one point");
    if (steps == 1 || f_max == f_min) return {f_min};
    std::vector<double> g(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) g[static_cast<std::size_t>(k)] = f_min + (f_max - f_min) * k / (steps - 1);
    return g;
}

// Drive amplitudes where the quasienergy spectrum collapses: Omega = k/2 for
// circular drives, zeros of J0 for linear driving.
inline std::vector<double> collapse_points(const DriveConfig& d, double f_max) {
    std::vector<double> out;
    if (d.circular()) {
        const double a = std::fabs(d.omega0_over_omega - d.handedness());
        for (int k = 1;; ++k) {
            const double omega = 0.5 * k;
            if (omega < a) continue;
            const double f = std::sqrt(omega * omega - a * a);
            if (f > f_max + 1.0) break;
            if (f > 0.0) out.push_back(f);
        }
    } else {
        const int n = std::max(1, static_cast<int>(f_max / 3.0) + 3);
        for (double z : bessel_j0_collapse_points(n)) {
            if (z <= f_max + 1.0) out.push_back(z);
        }
    }
    return out;
}

// Moves grid points sitting on a collapse point by +1e-6; returns notices.
inline std::vector<std::string> perturb_collapse_points(const DriveConfig& d, std::vector<double>& grid) {
    std::vector<std::string> notices;
    if (grid.empty()) return notices;
    const auto roots = collapse_points(d, grid.back());
    for (double& f : grid) {
        for (double r : roots) {
            if (std::fabs(f - r) < 1e-9) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "grid point F/omega=%.17g sits on a collapse point; moved to %.17g",
                              f, r + 1e-6);
                notices.emplace_back(buf);
                f = r + 1e-6;
            }
        }
    }
    return notices;
}

inline void validate(const SweepPlan& plan) {
    validate(DriveConfig{plan.drive.polarization, 0.0, plan.drive.omega0_over_omega});
    if (plan.f_grid.empty()) throw InvalidArgument("SweepPlan: empty F grid");
    for (std::size_t k = 0; k < plan.f_grid.size(); ++k) {
        if (!(plan.f_grid[k] >= 0.0)) throw InvalidArgument("SweepPlan: F grid values must be >= 0");
        if (k > 0 && !(plan.f_grid[k] > plan.f_grid[k - 1])) {
            throw InvalidArgument("SweepPlan: F grid must be strictly increasing");
        }
    }
    if (plan.outputs.needs_bath() && plan.baths.empty()) {
        throw InvalidArgument("SweepPlan: occupations/magnetization requested without a bath");
    }
    for (const auto& b : plan.baths) {
        validate(b);
        if (b.l_max > plan.controls.n_t / 2 - 1) {
            throw InvalidArgument("SweepPlan: l_max must be <= n_t/2 - 1");
        }
    }
    if (plan.solver != SolverKind::Numeric && !plan.drive.circular()) {
        throw InvalidArgument("SweepPlan: linear driving requires the numeric solver");
    }
}

// ------------------------------- Sweep result -------------------------------

struct SweepRow {
    double f_over_omega{0.0};
    int bath_index{-1};  // -1 for spectrum-only rows
    bool ok{false};
    std::string error;
    std::vector<double> eps;    // branch order
    std::vector<double> p;
    std::vector<double> szavg;
    double m_quasithermal{std::numeric_limits<double>::quiet_NaN()};
    double m_equilibrium{std::numeric_limits<double>::quiet_NaN()};
    RateDiagnostics diagnostics;
};

struct SweepResult {
    SweepPlan plan;  // with the perturbed grid
    int dim{0};
    std::vector<SweepRow> rows;
    std::vector<std::string> notices;
    bool all_ok() const {
        return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
    }
};

namespace detail {

struct PointOutcome {
    bool ok{false};
    std::string error;
    Eigen::MatrixXcd u0;
    std::vector<double> eps;
    std::vector<double> szavg;
    std::vector<BathOutcome> baths;
};

inline PointOutcome solve_point(const SpinSystem& s, const SweepPlan& plan, double f) {
    PointOutcome out;
    try {
        DriveConfig d = plan.drive;
        d.f_over_omega = f;
        const FloquetSolution fs = solve_floquet(s, d, plan.solver, plan.controls);
        out.u0 = fs.floquet_functions.front();
        out.eps = fs.quasienergies;
        out.szavg = cycle_averaged_sz(fs, s);
        if (plan.outputs.needs_bath()) {
            for (const auto& b : plan.baths) {
                out.baths.push_back(evaluate_bath(s, fs, out.szavg, d.omega0_over_omega, b));
            }
        }
        out.ok = true;
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

template <class T>
std::vector<T> apply_perm(const std::vector<T>& v, const std::vector<int>& perm) {
    std::vector<T> out(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) out[j] = v[static_cast<std::size_t>(perm[j])];
    return out;
}

}  // namespace detail

// Points are solved concurrently; branch tracking is a sequential pass, so
// the result does not depend on the thread count.
inline SweepResult run_sweep(SweepPlan plan) {
    const SpinSystem s = build_spin_system(plan.two_j);
    SweepResult result;
    result.notices = perturb_collapse_points(plan.drive, plan.f_grid);
    validate(plan);
    result.dim = s.dim;

    const std::size_t npts = plan.f_grid.size();
    std::vector<detail::PointOutcome> points(npts);
    unsigned nthreads = plan.threads > 0 ? static_cast<unsigned>(plan.threads) : std::thread::hardware_concurrency();
    nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(npts)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < npts; k = next++) points[k] = detail::solve_point(s, plan, plan.f_grid[k]);
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // First solved point: labels by descending cycle-averaged Sz.
    const detail::PointOutcome* prev = nullptr;
    std::vector<int> prev_perm;
    for (std::size_t k = 0; k < npts; ++k) {
        auto& pt = points[k];
        const double f = plan.f_grid[k];
        std::vector<int> perm(static_cast<std::size_t>(s.dim));
        if (pt.ok) {
            if (prev == nullptr) {
                for (int j = 0; j < s.dim; ++j) perm[static_cast<std::size_t>(j)] = j;
                std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
                    return pt.szavg[static_cast<std::size_t>(a)] > pt.szavg[static_cast<std::size_t>(b)];
                });
            } else {
                // Compare against the previous point in its branch order.
                const Eigen::MatrixXcd prev_u = [&] {
                    Eigen::MatrixXcd m(prev->u0.rows(), prev->u0.cols());
                    for (int j = 0; j < s.dim; ++j) m.col(j) = prev->u0.col(prev_perm[static_cast<std::size_t>(j)]);
                    return m;
                }();
                const auto prev_eps = detail::apply_perm(prev->eps, prev_perm);
                const BranchAssignment ba = track_branches(prev_u, prev_eps, pt.u0, pt.eps);
                perm = ba.perm;
                if (ba.fallback) {
                    char buf[200];
                    std::snprintf(buf, sizeof buf,
                                  "branch tracking ambiguous at F/omega=%.17g (min overlap %.3g); "
                                  "labels follow quasienergy order",
                                  f, ba.min_overlap);
                    result.notices.emplace_back(buf);
                }
            }
            prev = &pt;
            prev_perm = perm;
        }

        auto base_row = [&] {
            SweepRow row;
            row.f_over_omega = f;
            row.ok = pt.ok;
            row.error = pt.error;
            if (pt.ok) {
                row.eps = detail::apply_perm(pt.eps, perm);
                row.szavg = detail::apply_perm(pt.szavg, perm);
            }
            return row;
        };
        if (!plan.outputs.needs_bath()) {
            result.rows.push_back(base_row());
            continue;
        }
        for (std::size_t b = 0; b < plan.baths.size(); ++b) {
            SweepRow row = base_row();
            row.bath_index = static_cast<int>(b);
            if (pt.ok) {
                const BathOutcome& bo = pt.baths[b];
                row.ok = bo.ok;
                row.error = bo.error;
                row.m_equilibrium = bo.m_equilibrium;
                row.diagnostics = bo.diagnostics;
                if (bo.ok) {
                    row.p = detail::apply_perm(bo.p.p, perm);
                    row.m_quasithermal = bo.m_quasithermal;
                }
            } else {
                row.m_equilibrium =
                    mean_m(s, boltzmann_reference(s, plan.drive.omega0_over_omega, plan.baths[b].beta_hbar_omega));
            }
            result.rows.push_back(std::move(row));
        }
    }
    result.plan = std::move(plan);
    return result;
}

// --------------------------------- CSV I/O ----------------------------------

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Resolved plan as key = value pairs, using the CLI key names.
inline ConfigEcho describe_plan(const SweepPlan& plan) {
    ConfigEcho c;
    c.emplace_back("polarization", to_string(plan.drive.polarization));
    c.emplace_back("two-j", std::to_string(plan.two_j));
    c.emplace_back("omega0", format_real(plan.drive.omega0_over_omega));
    std::string grid;
    for (std::size_t k = 0; k < plan.f_grid.size(); ++k) grid += (k ? "," : "") + format_real(plan.f_grid[k]);
    c.emplace_back("f-grid", grid);
    c.emplace_back("solver", to_string(plan.solver));
    c.emplace_back("n-t", std::to_string(plan.controls.n_t));
    c.emplace_back("n-steps", std::to_string(plan.controls.n_steps));
    c.emplace_back("l-max", std::to_string(plan.controls.l_max));
    for (std::size_t b = 0; b < plan.baths.size(); ++b) {
        const auto& bs = plan.baths[b];
        const std::string key = "bath." + std::to_string(b);
        c.emplace_back(key, std::string("density=") + to_string(bs.density) +
                                " omega-c=" + format_real(bs.omega_c_over_omega) +
                                " beta=" + format_real(bs.beta_hbar_omega) + " gamma=" + format_real(bs.gamma[0]) +
                                "," + format_real(bs.gamma[1]) + "," + format_real(bs.gamma[2]) +
                                " l-max=" + std::to_string(bs.l_max) +
                                " freq-tolerance=" + format_real(bs.freq_tolerance));
    }
    return c;
}

inline void write_csv(std::ostream& os, const SweepResult& r, const ConfigEcho& extra = {}) {
    os << "# qtmag sweep\n# resolved-config begin\n";
    for (const auto& [k, v] : describe_plan(r.plan)) os << "# " << k << " = " << v << '\n';
    for (const auto& [k, v] : extra) os << "# " << k << " = " << v << '\n';
    os << "# resolved-config end\n";
    for (const auto& n : r.notices) os << "# notice: " << n << '\n';

    const int d = r.dim;
    os << "f_over_omega,density_kind,beta_hbar_omega";
    for (const char* prefix : {"eps_", "p_", "szavg_"}) {
        for (int k = 0; k < d; ++k) os << ',' << prefix << k;
    }
    os << ",m_quasithermal,m_equilibrium,skipped_terms\n";

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto put = [&](const std::vector<double>& v) {
        for (int k = 0; k < d; ++k) os << ',' << format_real(k < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(k)] : nan);
    };
    for (const auto& row : r.rows) {
        os << format_real(row.f_over_omega);
        if (row.bath_index >= 0) {
            const auto& b = r.plan.baths[static_cast<std::size_t>(row.bath_index)];
            os << ',' << to_string(b.density) << ',' << format_real(b.beta_hbar_omega);
        } else {
            os << ",none,nan";
        }
        put(row.eps);
        put(row.p);
        put(row.szavg);
        os << ',' << format_real(row.m_quasithermal) << ',' << format_real(row.m_equilibrium) << ','
           << row.diagnostics.skipped_terms << '\n';
    }
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        if (!row.ok) {
            os << "# failed row " << i << " f=" << format_real(row.f_over_omega) << ": " << row.error << '\n';
        } else if (row.bath_index >= 0) {
            const auto& dg = row.diagnostics;
            os << "# diag row=" << i << " skipped=" << dg.skipped_terms
               << " max_partial_rate=" << format_real(dg.max_partial_rate) << " l_range=" << dg.l_min_contributing
               << ".." << dg.l_max_contributing << '\n';
        }
    }
}

}  // namespace qtmag
