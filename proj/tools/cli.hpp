#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace superdiff::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Runs one subcommand; returns the process exit code.
int run(int argc, char** argv);
/// `args` starts at the subcommand name.
int run(const std::vector<std::string>& args);

/// "2^24", "4096" or "1e6".
std::uint64_t parse_count(const std::string& text);
double parse_real(const std::string& text);
/// "2^8..2^14" (every power of two in range), "16,32,64" or a single value.
std::vector<std::uint64_t> parse_count_grid(const std::string& text);
std::vector<double> parse_real_grid(const std::string& text);
/// "m^0.6" -> 0.6
double parse_power_rule(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace superdiff::cli
