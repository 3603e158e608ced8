#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace egotext {

// Writes `contents` to a sibling temporary file and renames it over `path`,
// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Stable 64-bit FNV-1a hash; used to derive per-image random streams.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

}  // namespace egotext
