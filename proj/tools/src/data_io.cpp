// SPDX-License-Identifier: Apache-2.0
#include "aabsp_cli/data_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "aabsp/error.hpp"

namespace aabsp::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<FailureRecord> read_failures(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<FailureRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw ParseError("expected two comma-separated fields", lineno);
    const std::string a = trim(t.substr(0, comma));
    const std::string b = trim(t.substr(comma + 1));
    if (!header) {
      if (a != "time" || b != "cause") throw ParseError("expected header 'time,cause'", lineno);
      header = true;
      continue;
    }
    FailureRecord rec{};
    {
      const auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), rec.time);
      if (ec != std::errc{} || p != a.data() + a.size() || a.empty())
        throw ParseError("time is not a number: '" + a + "'", lineno);
    }
    {
      const auto [p, ec] = std::from_chars(b.data(), b.data() + b.size(), rec.cause);
      if (ec != std::errc{} || p != b.data() + b.size() || b.empty())
        throw ParseError("cause is not an integer: '" + b + "'", lineno);
    }
    if (!(rec.time >= 0.0)) throw ParseError("time must be nonnegative", lineno);
    if (rec.cause < 1) throw ParseError("cause must be a 1-based index", lineno);
    out.push_back(rec);
  }
  if (!header) throw ValidationError("empty data file");
  return out;
}

std::vector<FailureRecord> read_failures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file '" + path + "'");
  return read_failures(in);
}

void write_failures(std::ostream& out, const std::vector<FailureRecord>& records) {
  out << "time,cause\n";
  char buf[64];
  for (const auto& r : records) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.time);
    out.write(buf, res.ptr - buf);
    out << ',' << r.cause << '\n';
  }
}

}  // namespace aabsp::cli
