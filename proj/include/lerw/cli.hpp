// Command-line front end of lerwlab.
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lerw {

/// Runs lerwlab with argv (argv[0] is the program name). Returns 0 on
/// success, 2 when a validation suite fails and 1 on usage or runtime errors.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Flat `key = value` lines; `#` starts a comment; keys may carry a leading
/// `--`; values may be double-quoted.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

/// argv with every config entry whose key is not already given as a flag
/// appended as `--key value`.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

/// "e" or the integer range "a:b".
std::vector<double> parse_exponents(const std::string& text);

/// "x1,x2,x3".
std::array<double, 3> parse_point(const std::string& text);

}  // namespace lerw
