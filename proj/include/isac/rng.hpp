// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace isac {

using Engine = std::mt19937_64;

/// Fixed sub-stream identifiers. Each pipeline stage draws from its own
/// stream so that changing one stage never perturbs another.
enum class Stage : std::uint64_t {
    geometry = 0,
    shadowing = 1,
    fading = 2,
    symbols = 3,
    ue_drop = 4,
};

/// Counter-based stream keyed by (seed, stage, trial, index). Streams with
/// distinct keys are statistically independent and can be created in any
/// order from any thread.
Engine make_stream(std::uint64_t seed, Stage stage, std::uint64_t trial, std::uint64_t index = 0);

/// CN(0, 1): real and imaginary parts i.i.d. N(0, 1/2).
std::complex<double> circular_normal(Engine& rng);

double uniform(Engine& rng, double lo, double hi);

double standard_normal(Engine& rng);

}  // namespace isac
