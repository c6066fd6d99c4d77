#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace s2spm::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit code partition shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Dispatches a full command line ("s2spm train ..."). Never calls exit();
// errors are printed to stderr and mapped onto the exit code partition.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

// FNV-1a 64 content digest, 16 hex characters.
std::string fnv1a_digest(const std::string& bytes);
std::string digest_file(const std::string& path);

// "3,5,8" or "3..6" or a mix; expanded, deduplicated, ascending.
std::vector<int> parse_k_list(const std::string& text);

}  // namespace s2spm::cli
