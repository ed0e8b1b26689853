#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plp::cli {

/// Exit codes: 0 success, 1 usage or input error, 2 numeric failure or singular input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plp::cli
