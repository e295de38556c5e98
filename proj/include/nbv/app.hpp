#pragma once

#include <iosfwd>

namespace nbv::app {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,       // bad flags, config, input files or scene digests
    kInfeasible = 3,  // no valid candidates, or the free box is not free
};

/// Entry point of the nbvplan tool. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nbv::app
