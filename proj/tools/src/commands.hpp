#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>

namespace obg::tools {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitViolation = 3;

// "1.25MiB", "64KiB", "4096", "2M" (binary multiples), "1.5MB" (decimal).
std::size_t parse_bytes(std::string_view text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace obg::tools
