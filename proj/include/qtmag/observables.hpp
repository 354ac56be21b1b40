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

// observables.hpp: one-cycle averages over Floquet states and the
// quasithermal magnetization <<m>> = sum_m <<u_m|Sz|u_m>> p_m.

#pragma once

#include <vector>

#include "qtmag/errors.hpp"
#include "qtmag/floquet.hpp"
#include "qtmag/spin_algebra.hpp"
#include "qtmag/steady_state.hpp"

namespace qtmag {

struct MagnetizationRecord {
    std::vector<double> time_averaged_sz;
    double quasithermal_m{0.0};
    double equilibrium_m{0.0};
};

// Uniform-grid average of <u_m(t_k)|Sz|u_m(t_k)>; exact for trigonometric
// polynomials of degree below n_t.
inline std::vector<double> cycle_averaged_sz(const FloquetSolution& fs, const SpinSystem& s) {
    if (fs.dim != s.dim) {
        throw InvalidArgument("cycle_averaged_sz: Floquet solution and spin dimension differ");
    }
    std::vector<double> avg(static_cast<std::size_t>(fs.dim), 0.0);
    for (const auto& uk : fs.floquet_functions) {
        const Eigen::MatrixXcd szu = s.sz * uk;
        for (int m = 0; m < fs.dim; ++m) {
            avg[static_cast<std::size_t>(m)] += uk.col(m).dot(szu.col(m)).real();
        }
    }
    for (double& v : avg) v /= fs.n_t;
    return avg;
}

inline double quasithermal_magnetization(const std::vector<double>& szavg, const OccupationDistribution& p) {
    if (szavg.size() != p.p.size()) {
        throw InvalidArgument("quasithermal_magnetization: occupation and Floquet-state counts differ");
    }
    double acc = 0.0;
    for (std::size_t m = 0; m < szavg.size(); ++m) acc += szavg[m] * p.p[m];
    return acc;
}

inline double quasithermal_magnetization(const FloquetSolution& fs, const SpinSystem& s,
                                         const OccupationDistribution& p) {
    return quasithermal_magnetization(cycle_averaged_sz(fs, s), p);
}

// Quasithermal value together with the Boltzmann reference at the same beta.
inline MagnetizationRecord magnetization_record(const FloquetSolution& fs, const SpinSystem& s,
                                                const OccupationDistribution& p, double omega0, double beta) {
    MagnetizationRecord r;
    r.time_averaged_sz = cycle_averaged_sz(fs, s);
    r.quasithermal_m = quasithermal_magnetization(r.time_averaged_sz, p);
    r.equilibrium_m = mean_m(s, boltzmann_reference(s, omega0, beta));
    return r;
}

}  // namespace qtmag
