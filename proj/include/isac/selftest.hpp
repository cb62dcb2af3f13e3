// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace isac {

/// Fast oracle checks across all modules. Prints one line per check and
/// returns true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace isac
