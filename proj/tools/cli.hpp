#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obl::cli {

// args exclude the program name. Exit codes: 0 success, 1 invariant failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// "a:b:n" gives n log-spaced radii from a to b; a single number gives one radius.
std::vector<double> parse_radii(const std::string& text);

}  // namespace obl::cli
