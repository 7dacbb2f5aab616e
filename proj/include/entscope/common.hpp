#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace entscope {

// FNV-1a 64-bit, used for file checksums and class-table hashes.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v);
std::uint64_t parse_hex_u64(std::string_view s);

// Shortest round-trip decimal for binary64; parse is bit-exact inverse.
std::string format_double(double v);
double parse_double(std::string_view s);

std::uint64_t parse_u64(std::string_view s);
int parse_int(std::string_view s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace entscope
