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

// floquet.hpp: Floquet states of a driven spin.
//
// Units: hbar = 1 and drive angular frequency = 1, so the period is 2*pi and
// quasienergies are measured in units of hbar*omega.
//
// Two solvers produce the same FloquetSolution layout:
//   * solve_circular_analytic: circular drives, through the rotating frame.
//   * solve_numeric: any drive, through the one-period propagator.
// Column m of floquet_functions[k] holds u_m(t_k), t_k = 2*pi*k/n_t, and the
// stored functions always belong to the folded quasienergy representative,
// i.e. psi_m(t) = u_m(t) exp(-i eps_m t) with eps_m in [-1/2, 1/2).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qtmag/errors.hpp"
#include "qtmag/spin_algebra.hpp"

namespace qtmag {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Polarization { RightCircular, LeftCircular, Linear };

inline const char* to_string(Polarization p) {
    switch (p) {
        case Polarization::RightCircular: return "right";
        case Polarization::LeftCircular: return "left";
        case Polarization::Linear: return "linear";
    }
    return "?";
}

struct DriveConfig {
    Polarization polarization{Polarization::RightCircular};
    double f_over_omega{0.0};       // F / omega, >= 0
    double omega0_over_omega{0.1};  // omega0 / omega, either sign

    bool circular() const { return polarization != Polarization::Linear; }
    // +1 for right-circular (field rotates with +t about z), -1 for left.
    int handedness() const { return polarization == Polarization::LeftCircular ? -1 : 1; }
};

inline void validate(const DriveConfig& d) {
    if (!(d.f_over_omega >= 0.0) || !std::isfinite(d.f_over_omega)) {
        throw InvalidArgument("DriveConfig: F/omega must be finite and >= 0");
    }
    if (!std::isfinite(d.omega0_over_omega)) {
        throw InvalidArgument("DriveConfig: omega0/omega must be finite");
    }
}

// H(t) = omega0 Sz + F (Sx cos t + Sy sin t)   right circular
//        omega0 Sz + F (Sx cos t - Sy sin t)   left circular
//        omega0 Sz + F Sx cos t                linear
inline Eigen::MatrixXcd hamiltonian(const SpinSystem& s, const DriveConfig& d, double t) {
    Eigen::MatrixXcd h = d.omega0_over_omega * s.sz;
    const double f = d.f_over_omega;
    switch (d.polarization) {
        case Polarization::RightCircular: h += f * (std::cos(t) * s.sx + std::sin(t) * s.sy); break;
        case Polarization::LeftCircular: h += f * (std::cos(t) * s.sx - std::sin(t) * s.sy); break;
        case Polarization::Linear: h += f * std::cos(t) * s.sx; break;
    }
    return h;
}

// Map a quasienergy into the Brillouin zone [-1/2, 1/2).
inline double fold_quasienergy(double e) {
    double f = e - std::floor(e + 0.5);
    if (f >= 0.5) f -= 1.0;
    return f;
}

// Distance between two quasienergies on the unit circle (in [0, 1/2]).
inline double circular_distance(double a, double b) {
    return std::fabs(fold_quasienergy(a - b));
}

// Max pairwise circular distance of a quasienergy set; zero at a complete
// collapse.
inline double quasienergy_spread(const std::vector<double>& eps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (std::size_t j = i + 1; j < eps.size(); ++j) {
            worst = std::max(worst, circular_distance(eps[i], eps[j]));
        }
    }
    return worst;
}

struct FloquetSolution {
    int dim{0};
    int n_t{0};
    std::vector<double> quasienergies;            // folded, [-1/2, 1/2)
    std::vector<double> canonical_quasienergies;  // unfolded branch through E_m at F = 0
    std::vector<Eigen::MatrixXcd> floquet_functions;

    static double time(int k, int n_t) { return kTwoPi * k / n_t; }
    Eigen::VectorXcd u(int m, int k) const { return floquet_functions[static_cast<std::size_t>(k)].col(m); }
    Eigen::VectorXcd u0(int m) const { return u(m, 0); }

    // Reorder states: new state j is old state perm[j].
    FloquetSolution permuted(const std::vector<int>& perm) const {
        FloquetSolution out = *this;
        for (std::size_t j = 0; j < perm.size(); ++j) {
            const auto src = static_cast<std::size_t>(perm[j]);
            out.quasienergies[j] = quasienergies[src];
            out.canonical_quasienergies[j] = canonical_quasienergies[src];
        }
        for (std::size_t k = 0; k < floquet_functions.size(); ++k) {
            for (std::size_t j = 0; j < perm.size(); ++j) {
                out.floquet_functions[k].col(static_cast<Eigen::Index>(j)) =
                    floquet_functions[k].col(perm[j]);
            }
        }
        return out;
    }
};

// ------------------------------ Rabi frequency ------------------------------

// Omega/omega = sqrt((omega0/omega -+ 1)^2 + (F/omega)^2), minus for right
// circular and plus for left circular driving.
inline double rabi_frequency(const DriveConfig& d) {
    if (!d.circular()) {
        throw InvalidArgument("rabi_frequency: no closed-form Rabi frequency for linear driving");
    }
    return std::hypot(d.omega0_over_omega - d.handedness(), d.f_over_omega);
}

// ------------------------- Analytic circular solution -----------------------

// In the frame co-rotating with the field the Hamiltonian is time independent,
//   H_rot = (omega0 - h) Sz + F Sx,   h = +1 right / -1 left,
// with eigenvalues Omega*m'. H_rot = Omega (n.S) with n = (sin th, 0, cos th),
// so its eigenvectors are exp(-i th Sy)|m'>. Floquet functions are
//   u_m(t) = exp(-i h t (Sz - s)) chi_m,   s = 1/2 for half-integer J else 0,
// up to the integer frequency shift that moves eps_m into the zone.
inline FloquetSolution solve_circular_analytic(const SpinSystem& s, const DriveConfig& d, int n_t = 128) {
    validate(d);
    if (!d.circular()) {
        throw InvalidArgument("solve_circular_analytic: linear drive has no analytic solution, use solve_numeric");
    }
    if (n_t < 4) {
        throw InvalidArgument("solve_circular_analytic: n_t must be >= 4");
    }
    const int h = d.handedness();
    const double a = d.omega0_over_omega - h;
    const double omega = rabi_frequency(d);
    const double theta = std::atan2(d.f_over_omega, a);
    const int branch_sign = a >= 0.0 ? 1 : -1;
    const double s_half = s.half_integer() ? 0.5 : 0.0;
    const Eigen::MatrixXcd rot = expm_hermitian(s.sy, theta);

    FloquetSolution out;
    out.dim = s.dim;
    out.n_t = n_t;
    out.quasienergies.resize(static_cast<std::size_t>(s.dim));
    out.canonical_quasienergies.resize(static_cast<std::size_t>(s.dim));
    out.floquet_functions.assign(static_cast<std::size_t>(n_t), Eigen::MatrixXcd(s.dim, s.dim));

    for (int k = 0; k < s.dim; ++k) {
        const double m = s.m_of(k);
        // Eigenvector that connects to |m> as F -> 0.
        const int col = branch_sign > 0 ? k : s.dim - 1 - k;
        const Eigen::VectorXcd chi = rot.col(col);
        const double lambda = branch_sign * omega * m;
        const double eps_raw = lambda + h * s_half;
        const double eps = fold_quasienergy(eps_raw);
        const double shift = std::round(eps - eps_raw);
        out.quasienergies[static_cast<std::size_t>(k)] = eps;
        out.canonical_quasienergies[static_cast<std::size_t>(k)] = lambda + h * m;
        for (int it = 0; it < n_t; ++it) {
            const double t = FloquetSolution::time(it, n_t);
            Eigen::VectorXcd u(s.dim);
            for (int b = 0; b < s.dim; ++b) {
                u(b) = std::polar(1.0, shift * t - h * t * (s.m_of(b) - s_half)) * chi(b);
            }
            out.floquet_functions[static_cast<std::size_t>(it)].col(k) = u;
        }
    }
    return out;
}

// ----------------------------- Numeric solution -----------------------------

struct NumericOptions {
    int n_t{128};
    int n_steps{4096};
    // Eigenphases closer than this are treated as degenerate.
    double degeneracy_tol{1e-10};
    // Operator diagonalized inside degenerate eigenspaces; Sz when unset.
    std::optional<Eigen::MatrixXcd> tie_break;
};

struct Propagation {
    Eigen::MatrixXcd period;                // U(2 pi, 0)
    std::vector<Eigen::MatrixXcd> samples;  // U(t_k, 0), k = 0..n_t-1
};

namespace detail {

// exp(-i t G) for Hermitian G by the diagonal [4/4] Pade approximant
// D(Z)^-1 N(Z), Z = -i t G. Since D(Z) = N(Z)^dag and both commute, the
// result is unitary to round-off. Used for short steps (|Z|_1 <= 0.5, error
// far below 1e-16); longer steps go through the eigendecomposition.
inline Eigen::MatrixXcd expm_hermitian_step(const Eigen::MatrixXcd& g, double t) {
    const Eigen::MatrixXcd z = cplx(0.0, -t) * g;
    if (z.cwiseAbs().colwise().sum().maxCoeff() > 0.5) return expm_hermitian(g, t);
    // c_k = (8-k)! 4! / (8! k! (4-k)!)
    constexpr double c1 = 1.0 / 2.0;
    constexpr double c2 = 3.0 / 28.0;
    constexpr double c3 = 1.0 / 84.0;
    constexpr double c4 = 1.0 / 1680.0;
    const Eigen::MatrixXcd z2 = z * z;
    const Eigen::MatrixXcd z3 = z2 * z;
    const Eigen::MatrixXcd z4 = z2 * z2;
    const Eigen::MatrixXcd even = Eigen::MatrixXcd::Identity(g.rows(), g.cols()) + c2 * z2 + c4 * z4;
    const Eigen::MatrixXcd odd = c1 * z + c3 * z3;
    return (even - odd).partialPivLu().solve(even + odd);
}

}  // namespace detail

// Fourth-order commutator-free Magnus integrator: each step is a product of
// two exact exponentials of Hermitian combinations of H at the Gauss points,
// so every step is unitary to round-off.
inline Propagation propagate(const SpinSystem& s, const DriveConfig& d, int n_t, int n_steps) {
    const double step = kTwoPi / n_steps;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double w1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
    const double w2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
    const int per_sample = n_steps / n_t;

    Propagation out;
    out.samples.reserve(static_cast<std::size_t>(n_t));
    Eigen::MatrixXcd u = s.identity();
    for (int j = 0; j < n_steps; ++j) {
        if (j % per_sample == 0) out.samples.push_back(u);
        const double t = j * step;
        const Eigen::MatrixXcd h1 = hamiltonian(s, d, t + c1 * step);
        const Eigen::MatrixXcd h2 = hamiltonian(s, d, t + c2 * step);
        const Eigen::MatrixXcd first = detail::expm_hermitian_step(w2 * h1 + w1 * h2, step);
        const Eigen::MatrixXcd second = detail::expm_hermitian_step(w1 * h1 + w2 * h2, step);
        u = second * (first * u);
    }
    out.period = std::move(u);
    return out;
}

namespace detail {

inline std::vector<std::vector<int>> degenerate_clusters(const std::vector<double>& eps, double tol) {
    const int n = static_cast<int>(eps.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (circular_distance(eps[static_cast<std::size_t>(i)], eps[static_cast<std::size_t>(j)]) < tol) {
                parent[static_cast<std::size_t>(find(j))] = find(i);
            }
        }
    }
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(find(i))].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& g : groups) {
        if (g.size() > 1) out.push_back(std::move(g));
    }
    return out;
}

inline double eigenphase_quasienergy(cplx lambda) {
    // U(T) v = exp(-i eps 2 pi) v
    return fold_quasienergy(-std::arg(lambda) / kTwoPi);
}

}  // namespace detail

inline FloquetSolution solve_numeric(const SpinSystem& s, const DriveConfig& d, const NumericOptions& opt = {}) {
    validate(d);
    if (opt.n_t < 4) {
        throw InvalidArgument("solve_numeric: n_t must be >= 4");
    }
    if (opt.n_steps < 100 || opt.n_steps % opt.n_t != 0) {
        throw InvalidArgument("solve_numeric: n_steps must be >= 100 and a multiple of n_t (got " +
                              std::to_string(opt.n_steps) + ")");
    }
    const Propagation prop = propagate(s, d, opt.n_t, opt.n_steps);
    const Eigen::MatrixXcd& ut = prop.period;
    const double unitarity = max_abs(ut.adjoint() * ut - s.identity());
    if (unitarity > 1e-8) {
        throw NonUnitaryPropagator("solve_numeric: |U^dag U - 1| = " + std::to_string(unitarity) +
                                   "; increase n_steps");
    }

    // U(T) is normal, so its complex Schur form is diagonal up to round-off
    // and the Schur vectors are an orthonormal eigenbasis even when
    // eigenphases coincide.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(ut);
    Eigen::MatrixXcd vecs = schur.matrixU();
    const int dim = s.dim;
    std::vector<double> eps(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
        eps[static_cast<std::size_t>(k)] = detail::eigenphase_quasienergy(schur.matrixT()(k, k));
    }

    const Eigen::MatrixXcd& tie = opt.tie_break ? *opt.tie_break : s.sz;
    for (const auto& cluster : detail::degenerate_clusters(eps, opt.degeneracy_tol)) {
        const auto n = static_cast<Eigen::Index>(cluster.size());
        Eigen::MatrixXcd sub(dim, n);
        for (Eigen::Index c = 0; c < n; ++c) sub.col(c) = vecs.col(cluster[static_cast<std::size_t>(c)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub.adjoint() * tie * sub);
        const Eigen::MatrixXcd rotated = sub * es.eigenvectors();
        for (Eigen::Index c = 0; c < n; ++c) {
            const int idx = cluster[static_cast<std::size_t>(c)];
            vecs.col(idx) = rotated.col(c);
            const cplx lam = rotated.col(c).dot(ut * rotated.col(c));
            eps[static_cast<std::size_t>(idx)] = detail::eigenphase_quasienergy(lam);
        }
    }

    FloquetSolution out;
    out.dim = dim;
    out.n_t = opt.n_t;
    out.quasienergies = eps;
    out.canonical_quasienergies = eps;
    out.floquet_functions.assign(static_cast<std::size_t>(opt.n_t), Eigen::MatrixXcd(dim, dim));
    for (int it = 0; it < opt.n_t; ++it) {
        const double t = FloquetSolution::time(it, opt.n_t);
        Eigen::MatrixXcd ucols = prop.samples[static_cast<std::size_t>(it)] * vecs;
        for (int m = 0; m < dim; ++m) {
            ucols.col(m) *= std::polar(1.0, eps[static_cast<std::size_t>(m)] * t);
        }
        out.floquet_functions[static_cast<std::size_t>(it)] = std::move(ucols);
    }

    // Label states by descending cycle-averaged Sz, which reproduces the
    // m = J..-J order of the undriven eigenstates.
    std::vector<double> avg(static_cast<std::size_t>(dim), 0.0);
    for (const auto& uk : out.floquet_functions) {
        for (int m = 0; m < dim; ++m) {
            avg[static_cast<std::size_t>(m)] += uk.col(m).dot(s.sz * uk.col(m)).real() / opt.n_t;
        }
    }
    std::vector<int> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        const double ax = avg[static_cast<std::size_t>(x)];
        const double ay = avg[static_cast<std::size_t>(y)];
        if (std::fabs(ax - ay) > 1e-12) return ax > ay;
        return eps[static_cast<std::size_t>(x)] > eps[static_cast<std::size_t>(y)];
    });
    return out.permuted(order);
}

// Doubles n_steps until no folded quasienergy moves by more than tol
// (at most max_doublings times). Returns the finest solution.
inline FloquetSolution solve_numeric_converged(const SpinSystem& s, const DriveConfig& d, NumericOptions opt,
                                               double tol = 1e-9, int max_doublings = 6) {
    FloquetSolution prev = solve_numeric(s, d, opt);
    for (int i = 0; i < max_doublings; ++i) {
        opt.n_steps *= 2;
        FloquetSolution next = solve_numeric(s, d, opt);
        std::vector<double> a = prev.quasienergies;
        std::vector<double> b = next.quasienergies;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double moved = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) moved = std::max(moved, circular_distance(a[k], b[k]));
        prev = std::move(next);
        if (moved < tol) return prev;
    }
    throw Error("solve_numeric_converged: quasienergies did not converge to " + std::to_string(tol));
}

// ----------------------------- Fourier elements -----------------------------

// <u_f(t)|V|u_i(t)> = sum_l V_fi^(l) exp(i l t),   w_fi^(l) = eps_f - eps_i + l,
// with the folded quasienergies used for every l.
struct FourierElements {
    int dim{0};
    int l_max{0};
    std::vector<double> quasienergies;
    std::vector<Eigen::MatrixXcd> coefficients;  // index l + l_max

    const Eigen::MatrixXcd& at(int l) const { return coefficients[static_cast<std::size_t>(l + l_max)]; }
    cplx coefficient(int f, int i, int l) const { return at(l)(f, i); }
    double frequency(int f, int i, int l) const {
        return quasienergies[static_cast<std::size_t>(f)] - quasienergies[static_cast<std::size_t>(i)] + l;
    }
};

// Sampled matrix elements <u_f(t_k)|V|u_i(t_k)>.
inline std::vector<Eigen::MatrixXcd> sampled_elements(const FloquetSolution& fs, const Eigen::MatrixXcd& v) {
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(fs.floquet_functions.size());
    for (const auto& uk : fs.floquet_functions) out.push_back(uk.adjoint() * v * uk);
    return out;
}

inline FourierElements fourier_elements(const FloquetSolution& fs, const Eigen::MatrixXcd& v, int l_max) {
    if (l_max < 0 || l_max > fs.n_t / 2 - 1) {
        throw InvalidArgument("fourier_elements: l_max must lie in [0, n_t/2 - 1] = [0, " +
                              std::to_string(fs.n_t / 2 - 1) + "]");
    }
    if (v.rows() != fs.dim || !is_hermitian(v, 1e-12)) {
        throw InvalidArgument("fourier_elements: coupling operator must be Hermitian of matching dimension");
    }
    const auto samples = sampled_elements(fs, v);
    FourierElements fe;
    fe.dim = fs.dim;
    fe.l_max = l_max;
    fe.quasienergies = fs.quasienergies;
    fe.coefficients.assign(static_cast<std::size_t>(2 * l_max + 1), Eigen::MatrixXcd::Zero(fs.dim, fs.dim));
    for (int l = -l_max; l <= l_max; ++l) {
        Eigen::MatrixXcd& c = fe.coefficients[static_cast<std::size_t>(l + l_max)];
        for (int k = 0; k < fs.n_t; ++k) {
            c += std::polar(1.0, -l * FloquetSolution::time(k, fs.n_t)) * samples[static_cast<std::size_t>(k)];
        }
        c /= static_cast<double>(fs.n_t);
    }
    return fe;
}

}  // namespace qtmag
