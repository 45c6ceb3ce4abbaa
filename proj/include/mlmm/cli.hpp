#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlmm/methods.hpp"

// Command-line front end. Every command writes a deterministic CSV or JSON
// artifact: byte-identical output for identical arguments, LF line endings,
// a single CSV header row, shortest-round-trip float formatting, and sorted
// JSON keys.

namespace mlmm::cli {

/// Dispatches argv (without the program name). Returns 0 on success, 2 on
/// argument errors (message names the offending flag), 1 on I/O failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Convenience overload writing to std::cout / std::cerr.
int run(const std::vector<std::string>& args);

/// Parses method tokens like "ab2", "ghvb1.8", "hb0.8-ab2", "nesterov0.5-ab1",
/// "interp0.5-ab2" (the inverse of MethodSpec::name). Throws
/// std::invalid_argument on malformed tokens.
[[nodiscard]] MethodSpec parse_method_token(const std::string& token);

/// Shortest decimal representation that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace mlmm::cli
