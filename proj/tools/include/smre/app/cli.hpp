#pragma once

#include <iosfwd>

namespace smre::app {

// Parses the command line and dispatches; progress goes to `out`, error
// records to `err`. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smre::app
