// Command-line front end. Exit codes: 0 definitive answer, 1 usage or input
// error, 2 Unknown verdict, numerical failure or rejected certificate.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace freespec::cli {

inline constexpr int kSchemaVersion = 1;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freespec::cli
