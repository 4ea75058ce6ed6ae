#pragma once

#include <filesystem>
#include <string>

namespace fde {

/// Shortest-round-trip-safe decimal rendering (17 significant digits).
std::string format_real(double v);

/// Writes text to path, replacing any existing file. LF line endings.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fde
