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

// errors.hpp: exception types thrown by the qtmag pipeline.
//
// Every failure that a caller may want to react to has its own type; all of
// them derive from qtmag::Error so a sweep can record any of them per row.

#pragma once

#include <stdexcept>
#include <string>

namespace qtmag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad parameter, wrong drive type, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

// two_j == 0: a one-level "spin" has no magnetization to compute.
struct TrivialSpin : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

// The one-period propagator drifted away from unitarity.
struct NonUnitaryPropagator : Error {
    using Error::Error;
};

// A transition frequency fell inside the resonance window where the bath
// occupation number diverges.
struct ResonantFrequency : Error {
    double frequency;
    ResonantFrequency(const std::string& what, double freq) : Error(what), frequency(freq) {}
};

// Every off-diagonal total rate vanished.
struct BathDisconnected : Error {
    using Error::Error;
};

// The master-equation generator has more than one null direction.
struct DegenerateSteadyState : Error {
    using Error::Error;
};

}  // namespace qtmag
