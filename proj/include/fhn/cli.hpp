#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fhn {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitParse = 2, kExitSolver = 3 };

/// Command-line entry point; args excludes the program name.
///
///   solve-ie        --spec PATH --out DIR [--set k=v]... [--grid nx,nt] [--linearized]
///   solve-fd        --spec PATH --out DIR [--set k=v]... [--grid nx,nt]
///   compare         A.csv B.csv [--out DIR]
///   tabulate-kernel --spec PATH [--out DIR] [--set k=v]... [--grid nx,nt]
///   verify          [--spec PATH] [--out DIR] [--set k=v]... [--checks a,b]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fhn
