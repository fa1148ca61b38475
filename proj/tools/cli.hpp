#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hreye::cli {

/// Runs one `hreye` invocation; args[0] is the program name. Returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hreye::cli
