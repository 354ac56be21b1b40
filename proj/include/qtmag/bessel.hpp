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

// bessel.hpp: Bessel function J0 and its positive zeros.
//
// Zeros of J0 locate the complete quasienergy collapses of a linearly driven
// spin in the high-frequency regime.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qtmag/errors.hpp"

namespace qtmag {

// J0 by its power series (long double, |x| < 14) or the Hankel asymptotic
// expansion (|x| >= 14). Absolute error is below ~1e-13 on the real line.
inline double bessel_j0(double x) {
    x = std::fabs(x);
    if (x < 14.0) {
        const long double q = 0.25L * static_cast<long double>(x) * x;
        long double term = 1.0L;
        long double sum = 1.0L;
        for (int k = 1; k < 200; ++k) {
            term *= -q / (static_cast<long double>(k) * k);
            sum += term;
            if (std::fabs(term) < 1e-21L * std::fabs(sum) && k > q) break;
        }
        return static_cast<double>(sum);
    }
    // P ~ sum (-1)^k a_{2k} / x^{2k}, Q ~ sum (-1)^{k+1} a_{2k+1} / x^{2k+1},
    // a_k = prod_{i=1..k} (2i-1)^2 / (k! 8^k).
    double p = 0.0;
    double q = 0.0;
    double a = 1.0;
    double prev = 1e300;
    for (int k = 0; k < 60; ++k) {
        const double t = a / std::pow(x, k);
        if (t > prev) break;  // asymptotic series starts to diverge
        prev = t;
        const double sign = (((k + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * t;
        } else {
            q += sign * t;
        }
        const double odd = 2.0 * k + 1.0;
        a *= odd * odd / (8.0 * (k + 1));
    }
    const double chi = x - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// First k_max positive zeros of J0: sign-change bracketing on a fixed scan
// step followed by bisection to machine precision.
inline std::vector<double> bessel_j0_collapse_points(int k_max) {
    if (k_max < 1) {
        throw InvalidArgument("bessel_j0_collapse_points: k_max must be >= 1");
    }
    std::vector<double> zeros;
    zeros.reserve(static_cast<std::size_t>(k_max));
    constexpr double step = 0.25;  // zeros are ~pi apart
    double lo = 0.0;
    double flo = bessel_j0(lo);
    while (static_cast<int>(zeros.size()) < k_max) {
        const double hi = lo + step;
        const double fhi = bessel_j0(hi);
        if (flo * fhi < 0.0) {
            double a = lo;
            double b = hi;
            double fa = flo;
            while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * b) {
                const double mid = 0.5 * (a + b);
                const double fm = bessel_j0(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            zeros.push_back(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
    }
    return zeros;
}

}  // namespace qtmag
