// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace isac {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInternal = 3;

/// Command-line entry point. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isac
