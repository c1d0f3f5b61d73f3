#pragma once

#include <string>
#include <vector>

namespace dfrcsg::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
// 3 analytic-vs-MC validation failure.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace dfrcsg::cli
