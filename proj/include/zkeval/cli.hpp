#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zkeval::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;  // verification or adjudication failed
inline constexpr int kUsage = 2;     // bad arguments, IO or input errors

// Environment variable naming the default work directory for relative paths.
inline constexpr const char* kWorkdirEnv = "ZKEVAL_WORKDIR";

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace zkeval::cli
