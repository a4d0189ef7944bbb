#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtlagent::support {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// True when `token` occurs in `text` delimited by non-identifier characters.
/// Identifier characters are [A-Za-z0-9_$]; matching is case-sensitive.
bool contains_whole_token(std::string_view text, std::string_view token);

/// FNV-1a 64-bit hash rendered as 16 hex digits. Stable across platforms.
std::string fnv1a_hex(std::string_view data);

/// Extracts the body of the first fenced code block (``` ... ```).
/// When `lang` is nonempty, only blocks tagged with that language match;
/// an untagged block is accepted as a fallback.
std::optional<std::string> extract_fenced_block(std::string_view text, std::string_view lang = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// Current UTC time as ISO-8601 with millisecond precision.
std::string iso8601_now();

/// Creates a fresh unique directory under the system temp dir.
std::filesystem::path make_temp_dir(std::string_view prefix);

}  // namespace rtlagent::support
