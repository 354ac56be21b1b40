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

// steady_state.hpp: stationary solution of the Pauli master equation
//   sum_m (G_nm p_m - G_mn p_n) = 0,   sum_n p_n = 1,
// and the Boltzmann distribution of the undriven spin.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qtmag/bath.hpp"
#include "qtmag/errors.hpp"
#include "qtmag/spin_algebra.hpp"

namespace qtmag {

struct OccupationDistribution {
    std::vector<double> p;
    double residual{0.0};      // max |L p|
    bool used_svd_fallback{false};
};

// L_nm = G_nm (n != m), L_nn = -sum_{m != n} G_mn.
inline Eigen::MatrixXd master_generator(const Eigen::MatrixXd& rates) {
    Eigen::MatrixXd l = rates;
    l.diagonal().setZero();
    for (Eigen::Index n = 0; n < l.cols(); ++n) {
        l(n, n) = -l.col(n).sum();
    }
    return l;
}

namespace detail {

inline std::vector<double> normalized_probabilities(const Eigen::VectorXd& x) {
    const double total = x.sum();
    if (!(std::fabs(total) > 0.0)) {
        throw DegenerateSteadyState("solve_steady_state: null vector has zero total weight");
    }
    std::vector<double> p(static_cast<std::size_t>(x.size()));
    for (Eigen::Index k = 0; k < x.size(); ++k) p[static_cast<std::size_t>(k)] = x(k) / total;
    // Round-off negativity is clamped; anything larger is a solver failure.
    bool clamped = false;
    for (double& v : p) {
        if (v < 0.0) {
            if (v < -1e-14) {
                throw DegenerateSteadyState("solve_steady_state: negative occupation " + std::to_string(v));
            }
            v = 0.0;
            clamped = true;
        }
    }
    if (clamped) {
        double s = 0.0;
        for (double v : p) s += v;
        for (double& v : p) v /= s;
    }
    return p;
}

}  // namespace detail

// Row-replacement solve (last balance equation swapped for the
// normalization), with an SVD null vector as fallback when that system has
// condition number above 1e12.
inline OccupationDistribution solve_steady_state(const RateMatrix& r) {
    const Eigen::Index n = r.gamma_total.rows();
    if (n == 0 || r.gamma_total.cols() != n) {
        throw InvalidArgument("solve_steady_state: rate matrix must be square and nonempty");
    }
    if ((r.gamma_total.array() < 0.0).any()) {
        throw InvalidArgument("solve_steady_state: rates must be nonnegative");
    }
    const Eigen::MatrixXd gen = master_generator(r.gamma_total);
    const double scale = gen.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        throw BathDisconnected("solve_steady_state: all rates vanish");
    }

    // Null-space dimension from the spectrum of the scaled generator.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen / scale, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double zero_tol = 1e-13 * static_cast<double>(n);
    int nullity = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) <= zero_tol) ++nullity;
    }
    if (nullity > 1) {
        std::string detail = "singular values:";
        for (Eigen::Index k = 0; k < sv.size(); ++k) detail += " " + std::to_string(sv(k));
        throw DegenerateSteadyState("solve_steady_state: degenerate steady state (" +
                                    std::to_string(nullity) + " null directions; " + detail + ")");
    }

    Eigen::MatrixXd a = gen / scale;
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;

    OccupationDistribution out;
    Eigen::JacobiSVD<Eigen::MatrixXd> asvd(a);
    const Eigen::VectorXd& asv = asvd.singularValues();
    const double cond = asv(asv.size() - 1) > 0.0 ? asv(0) / asv(asv.size() - 1) : INFINITY;
    Eigen::VectorXd x;
    if (cond <= 1e12) {
        x = a.fullPivLu().solve(rhs);
    } else {
        x = svd.matrixV().col(n - 1);
        out.used_svd_fallback = true;
    }
    out.p = detail::normalized_probabilities(x);
    Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(out.p.data(), n);
    out.residual = (gen * pv).cwiseAbs().maxCoeff();
    return out;
}

// p_m = exp(-beta omega0 m) / Z0 in the descending-m basis order.
inline OccupationDistribution boltzmann_reference(const SpinSystem& s, double omega0, double beta) {
    if (!(beta > 0.0)) {
        throw InvalidArgument("boltzmann_reference: beta must be positive");
    }
    std::vector<double> expo(static_cast<std::size_t>(s.dim));
    for (int k = 0; k < s.dim; ++k) expo[static_cast<std::size_t>(k)] = -beta * omega0 * s.m_of(k);
    const double shift = *std::max_element(expo.begin(), expo.end());
    OccupationDistribution out;
    out.p.resize(expo.size());
    double z = 0.0;
    for (std::size_t k = 0; k < expo.size(); ++k) {
        out.p[k] = std::exp(expo[k] - shift);
        z += out.p[k];
    }
    for (double& v : out.p) v /= z;
    return out;
}

inline double mean_m(const SpinSystem& s, const OccupationDistribution& p) {
    double acc = 0.0;
    for (int k = 0; k < s.dim; ++k) acc += s.m_of(k) * p.p[static_cast<std::size_t>(k)];
    return acc;
}

}  // namespace qtmag
