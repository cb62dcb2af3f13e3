// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// Invalid user-supplied configuration (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a kernel (non-PSD input, singular system).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The sensing direction lies inside the span of the user estimates.
class DegenerateProjection : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace isac
