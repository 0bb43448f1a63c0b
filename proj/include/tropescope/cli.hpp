#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tropescope::cli {

// Exit codes: 0 success, 1 usage error, 2 input syntax/format error,
// 3 I/O error. Diagnostics go to err, data to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, const char* const* argv);

}  // namespace tropescope::cli
