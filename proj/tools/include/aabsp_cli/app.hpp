// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace aabsp::cli {

// Entry point behind the aabsp executable.  Results go to `out`, every
// diagnostic to `err`; returns 0 iff the command succeeded.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aabsp::cli
