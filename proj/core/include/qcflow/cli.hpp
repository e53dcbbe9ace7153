#pragma once

#include <string>
#include <vector>

namespace qcflow::cli {

/// Runs one CLI invocation (args excludes the program name).  Writes JSON
/// reports and CSV meshes under --out-dir and prints the report to stdout.
/// Exit codes: 0 ok, 1 usage, 2 spec/parse error, 3 numerical failure,
/// 4 property violation (involutivity gate, Liouville bound breach).
int run_command(const std::vector<std::string>& args);

}  // namespace qcflow::cli
