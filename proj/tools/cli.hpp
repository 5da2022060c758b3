#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "satrand/cnf.hpp"

namespace satrand::cli {

/// Exit codes: 0 success, 1 usage or input error, 2 validation failure.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInvalid = 2;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// .sol files: signed literals, optionally prefixed by `v` and ended by 0.
Assignment parse_solution(const std::string& text);
std::string emit_solution(const Assignment& a);

}  // namespace satrand::cli
