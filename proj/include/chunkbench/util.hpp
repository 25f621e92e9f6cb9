#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chunkbench {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t v);

// 128-bit content address as 32 hex chars; two fnv1a passes with distinct seeds
// over "model_id \x1f text" so switching providers can never alias entries
std::string content_key(std::string_view model_id, std::string_view text);

std::string read_file(const std::filesystem::path& p);
std::vector<std::string> read_lines(const std::filesystem::path& p);

// write-temp-then-rename so partially written artifacts are never observed
void write_file_atomic(const std::filesystem::path& p, std::string_view data);
void append_line(const std::filesystem::path& p, std::string_view line);
void ensure_dir(const std::filesystem::path& p);

// fixed 6-decimal rendering used by every report so runs diff cleanly
std::string format_real(double v);

std::vector<std::string> split_list(const std::string& s, char sep = ',');
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace chunkbench
