#pragma once

#include <ostream>

namespace lipent {

/// Entry point of the `lipent` tool. Returns 0 when every pass flag of the
/// command is true, 1 when some check failed and 2 on usage or input errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lipent
