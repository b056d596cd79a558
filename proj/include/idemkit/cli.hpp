#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idemkit::cli {

/// Front end behind the idemkit binary; exposed so tests can drive it in
/// process. Exit codes: 0 all checks pass, 1 a theorem check failed,
/// 2 input/usage error.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace idemkit::cli
