#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eegc::cli {

enum ExitCode { kOk = 0, kUsage = 1, kFormat = 2, kCodec = 3, kMetric = 4 };

// Runs one command line (args excludes the program name). Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eegc::cli
