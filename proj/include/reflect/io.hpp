#pragma once

#include <string>

namespace reflect {

// Shortest text form that reloads to the identical double.
std::string format_g17(double x);

// Write via a temp file in the same directory, then rename.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace reflect
