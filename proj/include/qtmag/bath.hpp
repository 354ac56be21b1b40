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

// bath.hpp: thermal oscillator bath: spectral densities, Bose occupation
// numbers and golden-rule rates between Floquet states.
//
// rho0 = 1 and |gamma| enters only through |V_fi^(l)|^2; the absolute rate
// scale drops out of the steady state.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qtmag/errors.hpp"
#include "qtmag/floquet.hpp"
#include "qtmag/spin_algebra.hpp"

namespace qtmag {

enum class DensityKind { Constant, Quadratic, Gaussian };

inline const char* to_string(DensityKind k) {
    switch (k) {
        case DensityKind::Constant: return "constant";
        case DensityKind::Quadratic: return "quadratic";
        case DensityKind::Gaussian: return "gaussian";
    }
    return "?";
}

struct BathSpec {
    DensityKind density{DensityKind::Constant};
    double omega_c_over_omega{5.0};  // Gaussian centre, unused otherwise
    double beta_hbar_omega{1.0};
    Vec3 gamma{1.0, 0.0, 0.0};
    int l_max{32};
    double freq_tolerance{1e-9};
};

inline void validate(const BathSpec& b) {
    if (!(b.beta_hbar_omega > 0.0) || !std::isfinite(b.beta_hbar_omega)) {
        throw InvalidArgument("BathSpec: beta*hbar*omega must be positive and finite");
    }
    if (!(b.freq_tolerance > 0.0 && b.freq_tolerance <= 1e-3)) {
        throw InvalidArgument("BathSpec: freq_tolerance must lie in (0, 1e-3]");
    }
    if (b.l_max < 0) {
        throw InvalidArgument("BathSpec: l_max must be >= 0");
    }
}

// rho(|w|) in units of rho0.
inline double spectral_density(const BathSpec& b, double abs_freq) {
    if (!(abs_freq >= 0.0)) {
        throw InvalidArgument("spectral_density: expects |w| >= 0");
    }
    switch (b.density) {
        case DensityKind::Constant: return 1.0;
        case DensityKind::Quadratic: return abs_freq * abs_freq;
        case DensityKind::Gaussian: {
            const double x = abs_freq - b.omega_c_over_omega;
            return std::exp(-0.5 * x * x);
        }
    }
    return 0.0;
}

// N(w) = +-1 / (exp(beta w) - 1): absorption for w > 0, emission
// (1 + Bose factor) for w < 0.
inline double occupation(const BathSpec& b, double freq) {
    if (std::fabs(freq) < b.freq_tolerance) {
        throw ResonantFrequency("occupation: |w| = " + std::to_string(std::fabs(freq)) +
                                    " is below the resonance tolerance",
                                freq);
    }
    const double bose = 1.0 / std::expm1(b.beta_hbar_omega * std::fabs(freq));
    return freq > 0.0 ? bose : 1.0 + bose;
}

struct RateDiagnostics {
    long skipped_terms{0};       // l-terms dropped as resonant
    double max_partial_rate{0.0};
    int l_min_contributing{0};   // range of l with a nonzero partial rate
    int l_max_contributing{0};
    bool any_contribution{false};
};

struct RateMatrix {
    int dim{0};
    Eigen::MatrixXd gamma_total;  // (f, i): rate i -> f; diagonal zero
    RateDiagnostics diagnostics;
};

// Gamma_fi = 2 pi sum_l |V_fi^(l)|^2 N(w_fi^(l)) rho(|w_fi^(l)|), f != i.
inline RateMatrix rate_matrix(const FourierElements& fe, const BathSpec& b) {
    validate(b);
    if (b.l_max > fe.l_max) {
        throw InvalidArgument("rate_matrix: bath l_max exceeds the available Fourier range");
    }
    // |V_fi^(l)|^2 below this fraction of the largest element is round-off.
    constexpr double kZeroElement = 1e-20;
    double scale = 0.0;
    for (const auto& c : fe.coefficients) scale = std::max(scale, c.cwiseAbs2().maxCoeff());

    RateMatrix r;
    r.dim = fe.dim;
    r.gamma_total = Eigen::MatrixXd::Zero(fe.dim, fe.dim);
    auto& diag = r.diagnostics;
    std::vector<double> per_l(static_cast<std::size_t>(2 * b.l_max + 1), 0.0);
    for (int l = -b.l_max; l <= b.l_max; ++l) {
        const Eigen::MatrixXcd& c = fe.at(l);
        for (int f = 0; f < fe.dim; ++f) {
            for (int i = 0; i < fe.dim; ++i) {
                if (f == i) continue;
                const double v2 = std::norm(c(f, i));
                if (v2 <= kZeroElement * scale) continue;
                const double w = fe.frequency(f, i, l);
                if (std::fabs(w) < b.freq_tolerance) {
                    ++diag.skipped_terms;
                    continue;
                }
                const double partial = kTwoPi * v2 * occupation(b, w) * spectral_density(b, std::fabs(w));
                r.gamma_total(f, i) += partial;
                auto& slot = per_l[static_cast<std::size_t>(l + b.l_max)];
                slot = std::max(slot, partial);
            }
        }
    }
    diag.max_partial_rate = *std::max_element(per_l.begin(), per_l.end());
    for (int l = -b.l_max; l <= b.l_max; ++l) {
        // l-range carrying partial rates above 1e-12 of the largest one
        if (per_l[static_cast<std::size_t>(l + b.l_max)] > 1e-12 * diag.max_partial_rate &&
            diag.max_partial_rate > 0.0) {
            if (!diag.any_contribution) diag.l_min_contributing = l;
            diag.l_max_contributing = l;
            diag.any_contribution = true;
        }
    }
    if (!(r.gamma_total.maxCoeff() > 0.0)) {
        throw BathDisconnected("rate_matrix: bath cannot equilibrate system (all transition rates vanish)");
    }
    return r;
}

}  // namespace qtmag
