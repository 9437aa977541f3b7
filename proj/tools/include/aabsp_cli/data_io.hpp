// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aabsp/datalab.hpp"

namespace aabsp::cli {

// CSV with header `time,cause`, one observed failure per row.  Throws
// ParseError with the 1-based line number of the offending row, and
// ValidationError for an empty file.
std::vector<FailureRecord> read_failures(std::istream& in);
std::vector<FailureRecord> read_failures(const std::string& path);

void write_failures(std::ostream& out, const std::vector<FailureRecord>& records);

}  // namespace aabsp::cli
