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

// spin_algebra.hpp: spin-J operator matrices and small matrix helpers.
//
// Basis ordering is descending magnetic quantum number: index k holds
// m = J - k. The spin is stored through the integer 2J so half-integer J is
// exact.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

#include "qtmag/errors.hpp"

namespace qtmag {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

struct SpinSystem {
    int two_j{0};
    int dim{0};
    Eigen::MatrixXcd sx;
    Eigen::MatrixXcd sy;
    Eigen::MatrixXcd sz;

    double j() const { return 0.5 * two_j; }
    // Magnetic quantum number of basis index k.
    double m_of(int k) const { return 0.5 * two_j - k; }
    bool half_integer() const { return two_j % 2 != 0; }
    Eigen::MatrixXcd identity() const { return Eigen::MatrixXcd::Identity(dim, dim); }
};

inline SpinSystem build_spin_system(int two_j) {
    if (two_j < 0) {
        throw InvalidArgument("build_spin_system: two_j must be nonnegative");
    }
    if (two_j == 0) {
        throw TrivialSpin("build_spin_system: J = 0 is a one-level system without magnetization");
    }
    SpinSystem s;
    s.two_j = two_j;
    s.dim = two_j + 1;
    const double j = s.j();
    const int d = s.dim;
    Eigen::MatrixXcd splus = Eigen::MatrixXcd::Zero(d, d);
    s.sz = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = s.m_of(k);
        s.sz(k, k) = m;
        // S+ |m> = sqrt(J(J+1) - m(m+1)) |m+1>, and m+1 lives at index k-1.
        if (k > 0) {
            splus(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
        }
    }
    const Eigen::MatrixXcd sminus = splus.adjoint();
    s.sx = 0.5 * (splus + sminus);
    s.sy = cplx(0.0, -0.5) * (splus - sminus);
    return s;
}

// V = gx Sx + gy Sy + gz Sz
inline Eigen::MatrixXcd coupling_operator(const SpinSystem& s, const Vec3& gamma) {
    if (gamma[0] == 0.0 && gamma[1] == 0.0 && gamma[2] == 0.0) {
        throw InvalidArgument("coupling_operator: all-zero coupling vector leaves the spin uncoupled");
    }
    return gamma[0] * s.sx + gamma[1] * s.sy + gamma[2] * s.sz;
}

// exp(-i t G) for Hermitian G.
inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& g, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::VectorXcd ph(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        ph(k) = std::polar(1.0, -t * lam(k));
    }
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline double max_abs(const Eigen::MatrixXcd& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Eigen::MatrixXcd& a, double tol) {
    return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

}  // namespace qtmag
