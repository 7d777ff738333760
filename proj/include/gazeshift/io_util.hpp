#pragma once

#include <string>

namespace gazeshift {

// Whole-file helpers; both throw Error(Io) on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace gazeshift
