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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qtmag/errors.hpp"
#include "qtmag/spin_algebra.hpp"

namespace {

using qtmag::cplx;

// Oracle: matrix elements written out from <j m'|S_k|j m> directly, with the
// basis indexed by m rather than by row.
Eigen::MatrixXcd reference_component(int two_j, char axis) {
    const int dim = two_j + 1;
    const double j = two_j / 2.0;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const double mr = j - r;
            const double mc = j - c;
            const double up = (mr == mc + 1) ? std::sqrt((j - mc) * (j + mc + 1)) : 0.0;  // <m+1|S+|m>
            const double dn = (mr == mc - 1) ? std::sqrt((j + mc) * (j - mc + 1)) : 0.0;  // <m-1|S-|m>
            switch (axis) {
                case 'x': out(r, c) = 0.5 * (up + dn); break;
                case 'y': out(r, c) = cplx(0.0, -0.5) * (up - dn); break;
                default: out(r, c) = (r == c) ? mc : 0.0;
            }
        }
    }
    return out;
}

TEST(SpinAlgebra, SpinHalfIsPauliOverTwo) {
    const auto s = qtmag::build_spin_system(1);
    EXPECT_EQ(s.dim, 2);
    EXPECT_DOUBLE_EQ(s.sz(0, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(s.sz(1, 1).real(), -0.5);
    EXPECT_DOUBLE_EQ(s.sx(0, 1).real(), 0.5);
    EXPECT_DOUBLE_EQ(s.sx(1, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(s.sx(0, 0).real(), 0.0);
    EXPECT_DOUBLE_EQ(s.sy(0, 1).imag(), -0.5);
}

TEST(SpinAlgebra, SevenHalvesHasDescendingSz) {
    const auto s = qtmag::build_spin_system(7);
    ASSERT_EQ(s.dim, 8);
    for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(s.sz(k, k).real(), 3.5 - k);
    EXPECT_TRUE(s.half_integer());
}

TEST(SpinAlgebra, SpinOneTopRowOfSx) {
    const auto s = qtmag::build_spin_system(2);
    EXPECT_NEAR(s.sx(0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(s.sx(0, 1).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.sx(0, 2).real(), 0.0, 1e-15);
}

TEST(SpinAlgebra, MatchesIndependentMatrixElements) {
    for (int tj = 1; tj <= 16; ++tj) {
        const auto s = qtmag::build_spin_system(tj);
        EXPECT_LT(qtmag::max_abs(s.sx - reference_component(tj, 'x')), 1e-13) << "2J=" << tj;
        EXPECT_LT(qtmag::max_abs(s.sy - reference_component(tj, 'y')), 1e-13) << "2J=" << tj;
        EXPECT_LT(qtmag::max_abs(s.sz - reference_component(tj, 'z')), 1e-13) << "2J=" << tj;
    }
}

TEST(SpinAlgebra, CommutatorsCasimirHermiticityForAllSpins) {
    const cplx i(0.0, 1.0);
    for (int tj = 1; tj <= 16; ++tj) {
        const auto s = qtmag::build_spin_system(tj);
        const double j = s.j();
        EXPECT_LE(qtmag::max_abs(s.sx * s.sy - s.sy * s.sx - i * s.sz), 1e-12);
        EXPECT_LE(qtmag::max_abs(s.sy * s.sz - s.sz * s.sy - i * s.sx), 1e-12);
        EXPECT_LE(qtmag::max_abs(s.sz * s.sx - s.sx * s.sz - i * s.sy), 1e-12);
        EXPECT_LE(qtmag::max_abs(s.sx * s.sx + s.sy * s.sy + s.sz * s.sz - j * (j + 1) * s.identity()), 1e-12);
        EXPECT_TRUE(qtmag::is_hermitian(s.sx, 0.0));
        EXPECT_TRUE(qtmag::is_hermitian(s.sy, 0.0));
        EXPECT_TRUE(qtmag::is_hermitian(s.sz, 0.0));
        EXPECT_EQ(s.sz.trace(), cplx(0.0, 0.0));
    }
}

TEST(SpinAlgebra, RejectsTrivialAndNegativeSpin) {
    EXPECT_THROW(qtmag::build_spin_system(0), qtmag::TrivialSpin);
    EXPECT_THROW(qtmag::build_spin_system(-1), qtmag::InvalidArgument);
    try {
        qtmag::build_spin_system(-1);
    } catch (const qtmag::TrivialSpin&) {
        FAIL() << "negative 2J must not be reported as the trivial spin";
    } catch (const qtmag::InvalidArgument&) {
    }
}

TEST(CouplingOperator, Examples) {
    const auto s1 = qtmag::build_spin_system(1);
    const auto vx = qtmag::coupling_operator(s1, {1.0, 0.0, 0.0});
    EXPECT_LT(qtmag::max_abs(vx - s1.sx), 1e-15);

    Eigen::MatrixXcd expect(2, 2);
    expect << 0.5, cplx(0.5, -0.5), cplx(0.5, 0.5), -0.5;
    EXPECT_LT(qtmag::max_abs(qtmag::coupling_operator(s1, {1.0, 1.0, 1.0}) - expect), 1e-15);

    for (int tj : {1, 4, 7}) {
        const auto s = qtmag::build_spin_system(tj);
        EXPECT_LT(qtmag::max_abs(qtmag::coupling_operator(s, {0.0, 0.0, 1.0}) - s.sz), 1e-15);
    }
}

TEST(CouplingOperator, HermitianForRandomGamma) {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = qtmag::build_spin_system(1 + trial % 9);
        EXPECT_TRUE(qtmag::is_hermitian(qtmag::coupling_operator(s, {g(rng), g(rng), g(rng)}), 1e-15));
    }
}

TEST(CouplingOperator, RejectsZeroGamma) {
    const auto s = qtmag::build_spin_system(3);
    EXPECT_THROW(qtmag::coupling_operator(s, {0.0, 0.0, 0.0}), qtmag::InvalidArgument);
}

}  // namespace
