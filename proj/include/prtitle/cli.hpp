#pragma once

#include <iosfwd>

namespace prtitle {

/// Entry point of the `prtitle` tool. Returns 0 on success, 1 on usage
/// errors and 2 on runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prtitle
