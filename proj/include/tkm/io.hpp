#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tkm {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Splits on `sep`, trimming surrounding whitespace from each field.
std::vector<std::string> split_fields(std::string_view text, char sep);
std::string trim(std::string_view text);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tkm
