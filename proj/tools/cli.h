#ifndef SVGAUGE_TOOLS_CLI_H_
#define SVGAUGE_TOOLS_CLI_H_

#include <iosfwd>

namespace svgauge::cli {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitBackend = 3 };

// Runs one `svgauge` invocation. Results go to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svgauge::cli

#endif  // SVGAUGE_TOOLS_CLI_H_
