#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace causalaug::io {

/// Writes `contents` to `path` via a temp file in the same directory plus an
/// atomic rename, so readers never observe a truncated file.
void atomic_write_file(const std::string& path, const std::string& contents);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

/// FNV-1a 64-bit hash, used for dataset cache checksums.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n);

}  // namespace causalaug::io
