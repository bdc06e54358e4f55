#pragma once

#include <string>
#include <vector>

namespace mvcca::cli {

// Parses argv and dispatches to the library. Exit codes: 0 success, 2 usage
// error, 3 data/format error, 4 numeric error.
int run_cli(const std::vector<std::string>& args);

}  // namespace mvcca::cli
