#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace knotlab::cli {

// Exit codes: 0 success, 1 I/O failure, 2 invalid model, invariant or flags.
constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kInvalid = 2;

// args excludes the program name. Output that is not redirected with --out goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace knotlab::cli
